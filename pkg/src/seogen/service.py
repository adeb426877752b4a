"""HTTP suggestion service for editorial headline generation.

A small FastAPI app: POST /generate runs pasted article text through the
keyword and decoding pipeline, GET /health reports readiness, versions,
and the accepted parameter ranges, and GET /log/stats summarizes the
access log. Every /generate request is appended to a JSONL access log
(article text stored only as a SHA-256 hash) before the response goes
out, including failed requests.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from contextlib import asynccontextmanager
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__, _kernels
from .config import RunConfig
from .corpus import word_count
from .errors import SeogenError, ValidationError
from .pipeline import Resources, article_for_text, generate_for_article, load_resources

PARAM_BOUNDS = {
    "r": {"min": 1, "max": 60},
    "alpha": {"min": 0.0, "max": 2.0},
    "beta": {"min": -10.0, "max": 10.0},
    "position_scale": {"min": 0.1, "max": 100.0},
    "beam_size": {"min": 1, "max": 50},
    "max_len": {"min": 1, "max": 60},
    "n_best": {"min": 1, "max": 50},
}


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text: str
    r: int | None = None
    alpha: float | None = None
    beta: float | None = None
    position_scale: float | None = None
    beam_size: int | None = None
    max_len: int | None = None
    n_best: int | None = None
    use_keywords: bool = True
    pinned: list[str] = Field(default_factory=list)
    excluded: list[str] = Field(default_factory=list)


class _State:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.resources: Resources | None = None
        self.ready = False
        self.log_lock = threading.Lock()
        self.log_path = Path(cfg.service.access_log)


def _check_bounds(name: str, value) -> None:
    bounds = PARAM_BOUNDS[name]
    if not bounds["min"] <= value <= bounds["max"]:
        raise ValidationError(
            f"{name}={value} outside accepted range [{bounds['min']}, {bounds['max']}]"
        )


def _effective_params(req: GenerateRequest, cfg: RunConfig) -> dict:
    params = {
        "r": cfg.decode.r,
        "alpha": cfg.decode.alpha,
        "beta": cfg.decode.beta,
        "position_scale": cfg.decode.position_scale,
        "beam_size": cfg.decode.beam_size,
        "max_len": cfg.decode.max_len,
        "n_best": cfg.decode.n_best,
    }
    for name in params:
        override = getattr(req, name)
        if override is not None:
            _check_bounds(name, override)
            params[name] = override
    return params


def _log_entry(state: _State, entry: dict) -> None:
    line = json.dumps(entry, ensure_ascii=False) + "\n"
    with state.log_lock:
        with state.log_path.open("a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            if state.cfg.service.fsync_log:
                os.fsync(fh.fileno())


def create_app(cfg: RunConfig) -> FastAPI:
    state = _State(cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        state.resources = load_resources(cfg, prefer_catalog=True)
        state.ready = True
        yield

    app = FastAPI(title="seogen", version=__version__, lifespan=lifespan)
    app.state.seogen = state

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cfg.service.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        correlation_id = uuid.uuid4().hex
        return JSONResponse(
            status_code=500,
            content={"error": "internal error", "correlation_id": correlation_id},
            headers={"X-Correlation-Id": correlation_id},
        )

    @app.middleware("http")
    async def access_log(request: Request, call_next):
        if request.method != "POST" or request.url.path != "/generate":
            return await call_next(request)
        body = await request.body()
        text, params = "", {}
        try:
            parsed = json.loads(body)
            text = str(parsed.get("text", ""))
            params = {k: v for k, v in parsed.items() if k != "text"}
        except (json.JSONDecodeError, AttributeError):
            pass
        status = 500
        response = None
        try:
            response = await call_next(request)
            status = response.status_code
        finally:
            client = request.headers.get("x-client-id")
            if client is None:
                client = request.client.host if request.client else "unknown"
            _log_entry(
                state,
                {
                    "ts": datetime.now(timezone.utc).isoformat(),
                    "client": client,
                    "text_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
                    "params": params,
                    "status": status,
                    "n_candidates": request.scope.get("seogen_n_candidates"),
                },
            )
        return response

    @app.get("/health")
    def health():
        if not state.ready or state.resources is None:
            return JSONResponse(status_code=503, content={"status": "initializing"})
        res = state.resources
        return {
            "status": "ok",
            "version": __version__,
            "kernel_backend": _kernels.BACKEND,
            "vocab_size": len(res.vocab),
            "model": {
                "order": res.scorer.order,
                "vocab_size": res.scorer.vocab_size,
            },
            "param_bounds": PARAM_BOUNDS,
            "text_word_bounds": {
                "min": cfg.filters.min_body_words,
                "max": cfg.filters.max_body_words,
            },
        }

    @app.post("/generate")
    def generate(req: GenerateRequest, request: Request):
        if not state.ready or state.resources is None:
            raise HTTPException(status_code=503, detail="service is initializing")
        text = req.text.strip()
        if not text:
            raise HTTPException(status_code=400, detail="text must be non-empty")
        wc = word_count(text)
        lo, hi = cfg.filters.min_body_words, cfg.filters.max_body_words
        if not lo <= wc <= hi:
            raise HTTPException(
                status_code=422,
                detail=f"text has {wc} words, accepted range is [{lo}, {hi}]",
            )
        try:
            params = _effective_params(req, cfg)
            decode_cfg = cfg.decode.to_decode_config()
            decode_cfg = type(decode_cfg)(
                beam_size=params["beam_size"],
                max_len=params["max_len"],
                n_best=min(params["n_best"], params["beam_size"]),
                penalty=type(decode_cfg.penalty)(
                    r=params["r"],
                    alpha=params["alpha"],
                    beta=params["beta"],
                    position_scale=params["position_scale"],
                    rank_penalty_combine=cfg.decode.rank_penalty_combine,
                ),
                blocked_ngram_orders=decode_cfg.blocked_ngram_orders,
                block_repeat_words=decode_cfg.block_repeat_words,
            )
            article = article_for_text(text)
            result = generate_for_article(
                article,
                state.resources,
                decode_cfg,
                use_keywords=req.use_keywords,
                pinned=req.pinned,
                excluded=req.excluded,
            )
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        request.scope["seogen_n_candidates"] = len(result["candidates"])
        return {
            "candidates": result["candidates"],
            "keywords": result["keywords"],
            "params": params,
        }

    @app.get("/log/stats")
    def log_stats():
        if not state.log_path.exists():
            return {"total": 0, "by_day": {}, "by_client": {}, "by_status": {}}
        by_day: dict[str, int] = {}
        by_client: dict[str, int] = {}
        by_status: dict[str, int] = {}
        total = 0
        try:
            with state.log_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    entry = json.loads(line)
                    total += 1
                    day = str(entry.get("ts", ""))[:10]
                    by_day[day] = by_day.get(day, 0) + 1
                    client = str(entry.get("client", "unknown"))
                    by_client[client] = by_client.get(client, 0) + 1
                    status = str(entry.get("status", "?"))
                    by_status[status] = by_status.get(status, 0) + 1
        except (OSError, json.JSONDecodeError) as exc:
            raise SeogenError(f"access log unreadable: {exc}") from exc
        return {
            "total": total,
            "by_day": by_day,
            "by_client": by_client,
            "by_status": by_status,
        }

    return app
