"""HTTP facade for the embedding pipelines.

Stdlib-only server exposing dataset upload, asynchronous embedding jobs,
and classification to the labeling UI and scripts.  Artifacts are
content-addressed JSON files under a data directory; jobs are handled by
a small in-process worker pool and identical requests collapse onto the
same job id, so completed work is never recomputed.
"""

from __future__ import annotations

import hashlib
import json
import queue
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from . import __version__
from .classify import (UNCLASSIFIED, ZERO_CLASS, VacModel, classify_coords,
                       error_rate, fit_seeds)
from .embedding import (DisconnectedGraphError, Embedding, embed_graph,
                        from_json, to_json)
from .graph import build_graph
from .operators import parse_potential_spec


class ServiceError(Exception):
    def __init__(self, status, message):
        super().__init__(message)
        self.status = status
        self.message = message


class ContentStore:
    """Append-only JSON object store, one file per object, atomic writes."""

    def __init__(self, root):
        self.root = Path(root)
        for kind in ("datasets", "jobs", "embeddings"):
            (self.root / kind).mkdir(parents=True, exist_ok=True)

    def _path(self, kind, oid):
        if not oid.replace("-", "").isalnum():
            raise ServiceError(400, "malformed id %r" % (oid,))
        return self.root / kind / (oid + ".json")

    def put(self, kind, oid, obj):
        path = self._path(kind, oid)
        tmp = path.with_suffix(".tmp-%d" % threading.get_ident())
        tmp.write_text(json.dumps(obj, separators=(",", ":")))
        tmp.replace(path)

    def put_text(self, kind, oid, text):
        path = self._path(kind, oid)
        tmp = path.with_suffix(".tmp-%d" % threading.get_ident())
        tmp.write_text(text)
        tmp.replace(path)

    def get(self, kind, oid):
        path = self._path(kind, oid)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def get_text(self, kind, oid):
        path = self._path(kind, oid)
        if not path.exists():
            return None
        return path.read_text()

    def ids(self, kind):
        return sorted(p.stem for p in (self.root / kind).glob("*.json"))


def content_id(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class EmbeddingService:
    """State and operations behind the HTTP handler (usable in-process)."""

    def __init__(self, data_dir, point_cap=100_000, workers=2):
        self.store = ContentStore(data_dir)
        self.point_cap = int(point_cap)
        self.queue = queue.Queue()
        self.lock = threading.Lock()
        self.inflight = set()
        self.workers = [threading.Thread(target=self._worker, daemon=True)
                        for _ in range(max(1, workers))]
        for w in self.workers:
            w.start()
        self._recover()

    # -- datasets ------------------------------------------------------

    def post_dataset(self, body: bytes, content_type: str) -> dict:
        points, labels = _parse_dataset_body(body, content_type)
        if points.shape[0] == 0:
            raise ServiceError(400, "dataset has no rows")
        if points.shape[0] > self.point_cap:
            raise ServiceError(413, "dataset exceeds the %d-point cap"
                               % self.point_cap)
        payload = {"points": [float(v) for v in points.ravel()],
                   "shape": list(points.shape)}
        if labels is not None:
            payload["labels"] = [int(v) for v in labels]
        oid = content_id(payload)
        if self.store.get("datasets", oid) is None:
            self.store.put("datasets", oid, payload)
        return {"id": oid, "m": points.shape[0], "n_features": points.shape[1]}

    def get_dataset(self, oid) -> dict:
        obj = self.store.get("datasets", oid)
        if obj is None:
            raise ServiceError(404, "unknown dataset %r" % (oid,))
        m, n = obj["shape"]
        return {"id": oid, "m": m, "n_features": n, "points": obj["points"],
                "shape": obj["shape"], "labels": obj.get("labels")}

    def _dataset_points(self, oid) -> np.ndarray:
        obj = self.store.get("datasets", oid)
        if obj is None:
            raise ServiceError(404, "unknown dataset %r" % (oid,))
        m, n = obj["shape"]
        return np.asarray(obj["points"], dtype=np.float64).reshape(m, n)

    # -- embedding jobs ------------------------------------------------

    def post_embed(self, request: dict) -> dict:
        dataset_id = request.get("dataset_id")
        params = dict(request.get("params") or {})
        points = self._dataset_points(str(dataset_id))
        m = points.shape[0]
        k = params.get("k", 10)
        sigma = params.get("sigma", 1.0)
        alpha = params.get("alpha", 0.0)
        n = params.get("n", 2)
        seed = params.get("seed", 0)
        if not (isinstance(k, int) and 1 <= k < m):
            raise ServiceError(422, "k must be an integer in [1, m)")
        if not (isinstance(sigma, (int, float)) and sigma > 0):
            raise ServiceError(422, "sigma must be positive")
        if not (isinstance(alpha, (int, float)) and alpha >= 0):
            raise ServiceError(422, "alpha must be nonnegative")
        if not (isinstance(n, int) and 1 <= n <= m - 2):
            raise ServiceError(422, "n must be an integer in [1, m-2]")
        potential_text = params.get("potential")
        if potential_text is not None:
            if not isinstance(potential_text, str):
                raise ServiceError(422, "potential must be the spec list "
                                        "serialized as a JSON string")
            try:
                parse_potential_spec(json.loads(potential_text), m)
            except (ValueError, IndexError, json.JSONDecodeError) as exc:
                raise ServiceError(422, "bad potential spec: %s" % exc)
        canonical = {"dataset_id": dataset_id,
                     "params": {"k": k, "sigma": float(sigma),
                                "alpha": float(alpha), "n": n, "seed": seed,
                                "potential": potential_text}}
        job_id = content_id(canonical)
        with self.lock:
            job = self.store.get("jobs", job_id)
            if job is not None and job["state"] in ("done", "failed",
                                                    "running", "queued"):
                return {"job_id": job_id, "state": job["state"]}
            job = {"job_id": job_id, "state": "queued", "request": canonical,
                   "created": time.time(), "error": None, "result": None}
            self.store.put("jobs", job_id, job)
            self.inflight.add(job_id)
            self.queue.put(job_id)
        return {"job_id": job_id, "state": "queued"}

    def get_job(self, job_id) -> dict:
        job = self.store.get("jobs", job_id)
        if job is None:
            raise ServiceError(404, "unknown job %r" % (job_id,))
        return job

    def get_embedding(self, job_id) -> str:
        text = self.store.get_text("embeddings", job_id)
        if text is None:
            job = self.store.get("jobs", job_id)
            if job is None:
                raise ServiceError(404, "unknown embedding %r" % (job_id,))
            raise ServiceError(409, "job state is %r" % job["state"])
        return text

    def _worker(self):
        while True:
            job_id = self.queue.get()
            try:
                self._run_job(job_id)
            finally:
                with self.lock:
                    self.inflight.discard(job_id)
                self.queue.task_done()

    def _run_job(self, job_id):
        job = self.store.get("jobs", job_id)
        if job is None or job["state"] == "done":
            return
        job["state"] = "running"
        job["started"] = time.time()
        self.store.put("jobs", job_id, job)
        try:
            req = job["request"]
            params = req["params"]
            points = self._dataset_points(req["dataset_id"])
            graph = build_graph(points, params["k"], params["sigma"])
            potential = None
            if params.get("potential"):
                potential = parse_potential_spec(
                    json.loads(params["potential"]), points.shape[0])
            emb = embed_graph(graph, potential, params["alpha"], params["n"],
                              seed=params.get("seed", 0))
            self.store.put_text("embeddings", job_id, to_json(emb))
            job["state"] = "done"
            job["result"] = job_id
        except (ValueError, DisconnectedGraphError, ArithmeticError) as exc:
            job["state"] = "failed"
            job["error"] = "%s: %s" % (type(exc).__name__, exc)
        job["finished"] = time.time()
        self.store.put("jobs", job_id, job)

    def _recover(self):
        """Re-enqueue work that was interrupted by a restart."""
        for job_id in self.store.ids("jobs"):
            job = self.store.get("jobs", job_id)
            if job["state"] in ("queued", "running"):
                with self.lock:
                    if job_id not in self.inflight:
                        job["state"] = "queued"
                        self.store.put("jobs", job_id, job)
                        self.inflight.add(job_id)
                        self.queue.put(job_id)

    # -- classification ------------------------------------------------

    def post_classify(self, request: dict) -> dict:
        job_id = request.get("job_id")
        job = self.store.get("jobs", str(job_id))
        if job is None:
            raise ServiceError(404, "unknown job %r" % (job_id,))
        if job["state"] != "done":
            raise ServiceError(409, "job state is %r" % job["state"])
        emb = from_json(self.store.get_text("embeddings", str(job_id)))
        model = self._resolve_model(request, emb)
        labels = classify_coords(emb.coords, model)
        counts = {}
        for name, value in (("zero-class", ZERO_CLASS),
                            ("unclassified", UNCLASSIFIED)):
            counts[name] = int(np.sum(labels == value))
        for idx, name in enumerate(model.class_names):
            counts[name] = int(np.sum(labels == idx))
        out = {"labels": [int(v) for v in labels], "counts": counts,
               "class_names": list(model.class_names)}
        truth = request.get("truth")
        if truth is not None:
            truth = np.asarray(truth, dtype=np.int64)
            if truth.size != emb.m:
                raise ServiceError(422, "truth length %d != %d"
                                   % (truth.size, emb.m))
            out["error_rate"] = error_rate(
                labels, truth,
                zero_class_to=request.get("zero_class_to"),
                unclassified_to=request.get("unclassified_to"))
        return out

    def _resolve_model(self, request, emb: Embedding) -> VacModel:
        spec = request.get("model")
        if not isinstance(spec, dict):
            raise ServiceError(422, "missing model spec")
        try:
            if "fit_groups" in spec:
                groups = {str(k): [int(i) for i in v]
                          for k, v in spec["fit_groups"].items()}
                model = fit_seeds(emb, groups)
                if "norm_threshold" in spec:
                    model.norm_threshold = float(spec["norm_threshold"])
                return model
            return VacModel(
                seeds=np.asarray(spec["seeds"], dtype=np.float64),
                tightness=np.asarray(
                    spec.get("tightness",
                             [np.pi] * len(spec["seeds"])), dtype=np.float64),
                norm_threshold=float(spec.get("norm_threshold", 0.0)),
                class_names=list(spec.get("class_names", [])))
        except (KeyError, ValueError, IndexError, TypeError) as exc:
            raise ServiceError(422, "bad model spec: %s" % exc)


def _parse_dataset_body(body: bytes, content_type: str):
    text = body.decode("utf-8", errors="strict")
    if "json" in (content_type or ""):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ServiceError(400, "bad JSON: %s" % exc)
        pts = obj.get("points")
        if pts is None:
            raise ServiceError(400, "missing 'points'")
        try:
            if "shape" in obj:
                m, n = obj["shape"]
                points = np.asarray(pts, dtype=np.float64).reshape(m, n)
            else:
                points = np.asarray(pts, dtype=np.float64)
                if points.ndim != 2:
                    raise ValueError("points must be a row-major matrix")
        except ValueError as exc:
            raise ServiceError(400, "bad points: %s" % exc)
        labels = obj.get("labels")
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.size != points.shape[0]:
                raise ServiceError(400, "labels length mismatch")
        return points, labels
    # plain delimited text, numeric columns only
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = line.split(",") if "," in line else line.split()
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ServiceError(400, "non-numeric value at line %d" % lineno)
    if not rows:
        raise ServiceError(400, "dataset has no rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ServiceError(400, "ragged rows")
    return np.asarray(rows, dtype=np.float64), None


def make_handler(service: EmbeddingService, cors_origin="*"):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def _send(self, status, payload, raw=False):
            body = payload if raw else json.dumps(payload).encode()
            if isinstance(body, str):
                body = body.encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", cors_origin)
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def _fail(self, exc: ServiceError):
            self._send(exc.status, {"error": exc.message})

        def do_OPTIONS(self):
            self._send(204, {})

        def do_GET(self):
            try:
                parts = self.path.strip("/").split("/")
                if parts == ["health"]:
                    return self._send(200, {"status": "ok",
                                            "version": __version__})
                if len(parts) == 2 and parts[0] == "datasets":
                    return self._send(200, service.get_dataset(parts[1]))
                if len(parts) == 2 and parts[0] == "jobs":
                    return self._send(200, service.get_job(parts[1]))
                if len(parts) == 2 and parts[0] == "embeddings":
                    return self._send(200, service.get_embedding(parts[1]),
                                      raw=True)
                raise ServiceError(404, "no such endpoint")
            except ServiceError as exc:
                self._fail(exc)

        def do_POST(self):
            try:
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length)
                ctype = self.headers.get("Content-Type", "")
                parts = self.path.strip("/").split("/")
                if parts == ["datasets"]:
                    return self._send(200, service.post_dataset(body, ctype))
                if parts == ["embed"]:
                    return self._send(200,
                                      service.post_embed(_json_body(body)))
                if parts == ["classify"]:
                    return self._send(200,
                                      service.post_classify(_json_body(body)))
                raise ServiceError(404, "no such endpoint")
            except ServiceError as exc:
                self._fail(exc)

    return Handler


def _json_body(body: bytes) -> dict:
    try:
        obj = json.loads(body.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ServiceError(400, "bad JSON body: %s" % exc)
    if not isinstance(obj, dict):
        raise ServiceError(400, "body must be a JSON object")
    return obj


def serve(port=8008, data_dir="service-data", point_cap=100_000, workers=2,
          cors_origin="*"):
    """Run the HTTP service until interrupted; returns (server, service)
    when started with port 0 for tests."""
    service = EmbeddingService(data_dir, point_cap=point_cap, workers=workers)
    server = ThreadingHTTPServer(("0.0.0.0", port),
                                 make_handler(service, cors_origin))
    return server, service
