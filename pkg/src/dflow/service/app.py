"""HTTP endpoints for storing, validating, generating and merging models.

Response bodies (all JSON unless noted):

* ``POST /model`` 201 ``{"model_id": int}``; 422 carries a validation report.
* ``GET /model/{id}`` 200 ``{"model_id", "username", "source", "created_at", "updated_at", "version"}``.
* ``PUT /model/{id}`` 200 ``{"model_id": int, "version": int}``.
* ``DELETE /model/{id}`` 200 ``{"deleted": int}``.
* ``POST /model/validation`` 200 ``{"valid": bool, "diagnostics": [...]}``.
* ``POST /model/codegen`` 200 ``application/zip``.
* ``GET /model/merge`` 200 ``text/plain`` model source; 409 ``{"conflicts": [...]}``.
* ``GET /user/{username}/model/latest`` 200 as ``GET /model/{id}``.

Malformed request bodies get 400 ``{"error": str}``.
"""

from __future__ import annotations

import json
import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from ..codegen import generate
from ..merger import MergeError, merge
from ..parser import parse
from ..printer import print_model
from ..validator import check_source
from .store import ModelStore

log = logging.getLogger("dflow.service")


class BadRequest(Exception):
    pass


async def _body(request: Request, *fields: str) -> dict:
    try:
        data = json.loads(await request.body())
    except (ValueError, UnicodeDecodeError):
        raise BadRequest("request body must be a JSON object") from None
    if not isinstance(data, dict):
        raise BadRequest("request body must be a JSON object")
    for name in fields:
        if not isinstance(data.get(name), str):
            raise BadRequest(f"field '{name}' is required and must be a string")
    return data


def _not_found(what: str) -> JSONResponse:
    return JSONResponse({"error": f"{what} not found"}, status_code=404)


def create_app(store: ModelStore) -> FastAPI:
    app = FastAPI(title="dflow", version="0.1.0")
    app.state.store = store

    @app.exception_handler(BadRequest)
    async def bad_request(_: Request, exc: BadRequest) -> JSONResponse:
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        response = await call_next(request)
        log.info("%s %s %d", request.method, request.url.path, response.status_code)
        return response

    @app.post("/model")
    async def store_model(request: Request):
        data = await _body(request, "username", "source")
        model, report = check_source(data["source"])
        if not report.valid:
            return JSONResponse(report.to_dict(), status_code=422)
        stored = store.create(data["username"], data["source"])
        return JSONResponse({"model_id": stored.model_id}, status_code=201)

    # Registered before /model/{model_id} so the literal paths win.
    @app.post("/model/validation")
    async def validation(request: Request):
        data = await _body(request, "source")
        _, report = check_source(data["source"])
        return report.to_dict()

    @app.post("/model/codegen")
    async def codegen(request: Request):
        data = await _body(request, "source")
        model, report = check_source(data["source"])
        if not report.valid:
            return JSONResponse(report.to_dict(), status_code=422)
        archive = generate(model).to_zip()
        return Response(
            archive,
            media_type="application/zip",
            headers={"Content-Disposition": 'attachment; filename="rasa-project.zip"'},
        )

    @app.get("/model/merge")
    async def merged():
        models = [parse(stored.source, f"model {stored.model_id}") for stored in store.latest_per_user()]
        try:
            result = merge(models)
        except MergeError as exc:
            return JSONResponse({"conflicts": [c.to_dict() for c in exc.conflicts]}, status_code=409)
        return PlainTextResponse(print_model(result))

    @app.get("/model/{model_id}")
    async def get_model(model_id: int):
        stored = store.get(model_id)
        return stored.to_dict() if stored else _not_found(f"model {model_id}")

    @app.put("/model/{model_id}")
    async def update_model(model_id: int, request: Request):
        if store.get(model_id) is None:
            return _not_found(f"model {model_id}")
        data = await _body(request, "source")
        _, report = check_source(data["source"])
        if not report.valid:
            return JSONResponse(report.to_dict(), status_code=422)
        stored = store.update(model_id, data["source"])
        if stored is None:
            return _not_found(f"model {model_id}")
        return {"model_id": stored.model_id, "version": stored.version}

    @app.delete("/model/{model_id}")
    async def delete_model(model_id: int):
        if not store.delete(model_id):
            return _not_found(f"model {model_id}")
        return {"deleted": model_id}

    @app.get("/user/{username}/model/latest")
    async def latest(username: str):
        stored = store.latest_for(username)
        return stored.to_dict() if stored else _not_found(f"models of user '{username}'")

    return app
