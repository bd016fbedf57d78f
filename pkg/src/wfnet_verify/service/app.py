"""FastAPI service wrapping the verification core.

Error mapping: parse and option errors answer 400, structural validation
failures answer 422 with the violation report, a missing spin binary
answers 424 and unparseable spin output 502. The CLI translates these
into its exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import netio, spin, statespace
from ..netio import NetDocument, ParseError
from ..petri import NetError
from ..promela import EmitOptions, EmitOptionsError, emit_model
from ..wfnet import WFNet, WFRNet, make_wfrnet, validate_wfnet
from . import schemas


def _parse(req: schemas.NetSource) -> NetDocument:
    parser = netio.parse_pnml if req.format == "pnml" else netio.parse_dsl
    return parser(req.source)


def _validated(doc: NetDocument) -> WFNet | WFRNet:
    """Validate structure; raise 422 with the report on violations."""
    if doc.has_resources:
        report, wfr = make_wfrnet(
            doc.net, doc.resources, doc.declared_source, doc.declared_sink
        )
        target = wfr
    else:
        report, target = validate_wfnet(
            doc.net, doc.declared_source, doc.declared_sink
        )
    if target is None:
        raise HTTPException(
            status_code=422, detail=netio.structural_report_to_dict(report)
        )
    return target


def _verdict(wf: WFNet | WFRNet, k: int, cap: int) -> statespace.Verdict:
    if isinstance(wf, WFRNet):
        return statespace.check_kr_soundness(wf, k, cap)
    if k == 1:
        return statespace.check_soundness(wf, cap)
    return statespace.check_k_soundness(wf, k, cap)


def create_app() -> FastAPI:
    app = FastAPI(
        title="wfnet-verify",
        description="Workflow-net soundness verification with Promela/LTL export",
        version="0.1.0",
    )

    @app.exception_handler(ParseError)
    async def _parse_error(request, exc: ParseError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"error": "parse", "message": exc.message, "line": exc.line}},
        )

    @app.exception_handler(NetError)
    async def _net_error(request, exc: NetError):
        return JSONResponse(
            status_code=400, content={"detail": {"error": "net", "message": str(exc)}}
        )

    @app.exception_handler(EmitOptionsError)
    async def _emit_error(request, exc: EmitOptionsError):
        return JSONResponse(
            status_code=400, content={"detail": {"error": "options", "message": str(exc)}}
        )

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        doc = _parse(req)
        if doc.has_resources:
            report, wfr = make_wfrnet(
                doc.net, doc.resources, doc.declared_source, doc.declared_sink
            )
            wf = wfr.wfnet if wfr is not None else None
        else:
            report, wf = validate_wfnet(
                doc.net, doc.declared_source, doc.declared_sink
            )
        return schemas.ValidateResponse(
            valid=report.valid,
            violations=[
                schemas.ViolationModel(condition=v.condition, detail=v.detail)
                for v in report.violations
            ],
            source=wf.source_id if wf is not None else None,
            sink=wf.sink_id if wf is not None else None,
            warnings=doc.warnings,
        )

    @app.post("/check", response_model=schemas.CheckResponse)
    def check(req: schemas.CheckRequest) -> JSONResponse:
        doc = _parse(req)
        wf = _validated(doc)
        verdict = _verdict(wf, req.k, req.cap)
        # Bypass model serialization so optional keys (witness, cap) appear
        # only when present, matching the report schema exactly.
        return JSONResponse(content=netio.verdict_to_dict(verdict))

    @app.post("/emit", response_model=schemas.EmitResponse)
    def emit(req: schemas.EmitRequest) -> schemas.EmitResponse:
        doc = _parse(req)
        wf = _validated(doc)
        emitted = emit_model(
            wf,
            EmitOptions(
                k=req.k,
                closure=req.closure,
                weighted=req.weighted,
                properties=tuple(req.properties),
            ),
        )
        return schemas.EmitResponse(
            model=emitted.text,
            place_index_map=emitted.place_index_map,
            transition_index_map=emitted.transition_index_map,
            property_names=list(emitted.property_names),
        )

    @app.post("/spin-check", response_model=schemas.SpinCheckResponse)
    def spin_check(req: schemas.SpinCheckRequest) -> JSONResponse:
        doc = _parse(req)
        wf = _validated(doc)
        verdict = _verdict(wf, req.k, req.cap)
        try:
            report = spin.cross_check(
                wf, verdict, req.property, k=req.k, spin_path=req.spin_path
            )
        except spin.SpinNotFoundError as exc:
            raise HTTPException(
                status_code=424, detail={"error": "spin_not_found", "message": str(exc)}
            ) from exc
        except spin.SpinOutputError as exc:
            raise HTTPException(
                status_code=502,
                detail={
                    "error": "spin_unparseable",
                    "message": str(exc),
                    "raw": exc.raw,
                },
            ) from exc
        except ValueError as exc:
            raise HTTPException(
                status_code=409, detail={"error": "verdict", "message": str(exc)}
            ) from exc
        return JSONResponse(content=report)

    return app


app = create_app()
