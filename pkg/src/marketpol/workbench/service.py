"""HTTP labeling service for the human review loop.

State lives in a LabelSession: the label store, current model, candidate
queues per stratum, and an append-only verdict log. Verdict writes are
serialized under a lock and appended to the log before they are
acknowledged, so a restart replays every acknowledged verdict. Retraining
runs on a worker thread; while it runs the session answers reads but
rejects mutations with a busy response.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from ..errors import EmptySegmentError, MarketpolError
from ..hetgraph import (
    HeteroGraph,
    LabelStore,
    PoliticalClass,
    Provenance,
)
from ..polmetrics import SegmentSpec, compute_totals, segment_report
from ..rgcn import (
    RgcnConfig,
    RgcnModel,
    STRATA,
    Verdict,
    build_view,
    candidate_strata,
    hitl_iterate,
    score_products,
    threshold_curve,
)

DEFAULT_BATCH = 50


@dataclass
class VerdictRecord:
    verdict_id: str
    node_key: str
    cls: str
    operator: str
    iteration: int
    status: str  # applied | pending | rejected:<reason>


@dataclass
class LabelSession:
    graph: HeteroGraph
    labels: LabelStore
    model: RgcnModel
    base_config: RgcnConfig
    wal_path: str | None = None
    batch_size: int = DEFAULT_BATCH
    agreement: int = 1  # verdicts per (node, class) needed to apply
    metrics_replicates: int = 500
    session_id: str = "session-1"

    iteration: int = 0
    model_version: int = 1
    retraining: bool = False
    candidates: dict[str, list[int]] = field(default_factory=dict)
    curves: dict[int, list[tuple[float, float]]] = field(default_factory=dict)
    applied_verdicts: dict[str, VerdictRecord] = field(default_factory=dict)
    votes: dict[tuple[int, str], set[str]] = field(default_factory=dict)
    yield_log: dict[int, dict[str, int]] = field(default_factory=dict)
    audit_log: list[dict] = field(default_factory=list)

    def __post_init__(self):
        self.graph.freeze()
        self.view = build_view(self.graph)
        self.lock = threading.Lock()
        self._refresh_candidates()
        self._record_curve()
        self.yield_log.setdefault(self.iteration, {"shown": 0, "applied": 0})
        if self.wal_path:
            self._replay_wal()

    # ------------------------------------------------------------- internals

    def _refresh_candidates(self) -> None:
        scores = score_products(self.model, self.view)
        self.candidates = candidate_strata(scores, self.labels, self.batch_size)
        self._scores = scores

    def _record_curve(self) -> None:
        self.curves[self.iteration] = threshold_curve(self._scores)

    def _append_wal(self, record: VerdictRecord) -> None:
        if not self.wal_path:
            return
        with open(self.wal_path, "a") as fh:
            fh.write(
                json.dumps(
                    {
                        "verdict_id": record.verdict_id,
                        "node_key": record.node_key,
                        "class": record.cls,
                        "operator": record.operator,
                        "iteration": record.iteration,
                        "status": record.status,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
            fh.flush()
            os.fsync(fh.fileno())

    def _replay_wal(self) -> None:
        path = Path(self.wal_path)
        if not path.exists():
            return
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                if row["verdict_id"] in self.applied_verdicts:
                    continue
                self._apply_verdict_locked(
                    verdict_id=row["verdict_id"],
                    node_key=row["node_key"],
                    cls=row["class"],
                    operator=row.get("operator", "default"),
                    log=False,
                )
        self._refresh_candidates()

    def _apply_verdict_locked(
        self, verdict_id: str, node_key: str, cls: str, operator: str, log: bool = True
    ) -> VerdictRecord:
        existing = self.applied_verdicts.get(verdict_id)
        if existing is not None:
            return existing

        def finish(status: str) -> VerdictRecord:
            record = VerdictRecord(
                verdict_id=verdict_id,
                node_key=node_key,
                cls=cls,
                operator=operator,
                iteration=self.iteration,
                status=status,
            )
            self.applied_verdicts[verdict_id] = record
            self.audit_log.append(
                {"verdict_id": verdict_id, "node": node_key, "class": cls,
                 "operator": operator, "iteration": self.iteration, "status": status}
            )
            if log:
                self._append_wal(record)
            return record

        if not self.graph.has_key(node_key):
            return finish("rejected:unknown-node")
        node = self.graph.id_of(node_key)
        if not self.view.contains(node):
            return finish("rejected:unknown-node")
        current = self.labels.get(node)
        if current is not None and current.provenance == Provenance.SEED:
            return finish("rejected:seed-precedence")
        try:
            political_class = PoliticalClass(cls)
        except ValueError:
            return finish("rejected:unknown-class")

        if self.agreement > 1:
            voters = self.votes.setdefault((node, cls), set())
            voters.add(operator)
            if len(voters) < self.agreement:
                return finish("pending")
        from ..hetgraph import PoliticalLabel

        self.labels.apply(
            PoliticalLabel(node, political_class, 1.0, Provenance.HUMAN, self.iteration)
        )
        self.yield_log.setdefault(self.iteration, {"shown": 0, "applied": 0})
        self.yield_log[self.iteration]["applied"] += 1
        return finish("applied")

    def _retrain_worker(self) -> None:
        try:
            # snapshot under the lock; verdicts are rejected while
            # retraining, so the merge cannot clobber a late write
            with self.lock:
                labels_snapshot = self.labels.copy()
                next_iteration = self.iteration + 1
            model, merged, _splits, report = hitl_iterate(
                labels_snapshot, [], self.view, self.base_config, iteration=next_iteration
            )
            with self.lock:
                self.model = model
                self.labels = merged
                self.iteration = next_iteration
                self.model_version += 1
                self._refresh_candidates()
                self._record_curve()
                self.yield_log.setdefault(self.iteration, {"shown": 0, "applied": 0})
                self.audit_log.append(
                    {"event": "retrain", "iteration": self.iteration,
                     "model_version": self.model_version,
                     "test_acc": report.test_acc}
                )
        finally:
            self.retraining = False

    # ------------------------------------------------------------ public API

    def status(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": "retraining" if self.retraining else "idle",
            "iteration": self.iteration,
            "model_version": self.model_version,
            "label_counts": self.labels.counts(),
            "yield": {str(k): v for k, v in sorted(self.yield_log.items())},
            "agreement": self.agreement,
        }

    def candidate_items(self, stratum: str, limit: int) -> list[dict]:
        nodes = self.candidates.get(stratum, [])[:limit]
        items = []
        index = {int(g): i for i, g in enumerate(self._scores.graph_ids)}
        for node in nodes:
            i = index[node]
            attrs = self.graph.node_attrs[node]
            label = self.labels.get(node)
            items.append(
                {
                    "node": self.graph.keys[node],
                    "title": attrs.get("name", self.graph.keys[node]),
                    "category": attrs.get("main_category", ""),
                    "probabilities": {
                        name: float(self._scores.probs[i][c])
                        for c, name in enumerate(self.model.class_names)
                    },
                    "stratum": stratum,
                    "provenance": label.provenance.value if label else "",
                }
            )
        self.yield_log.setdefault(self.iteration, {"shown": 0, "applied": 0})
        self.yield_log[self.iteration]["shown"] += len(items)
        return items


class VerdictRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True, protected_namespaces=())

    node: str
    cls: str = Field(alias="class")
    verdict_id: str
    operator: str = "default"
    model_version: int | None = None


def create_app(session: LabelSession, token: str | None = None) -> FastAPI:
    app = FastAPI(title="labeling service")

    def check_token(x_api_token: str | None = Header(default=None)):
        if token is not None and x_api_token != token:
            raise HTTPException(status_code=401, detail="bad token")

    @app.exception_handler(MarketpolError)
    async def marketpol_error(_, exc: MarketpolError):
        return JSONResponse(status_code=400, content={"error": exc.code, "message": str(exc)})

    @app.get("/api/session", dependencies=[Depends(check_token)])
    def get_session():
        return session.status()

    @app.get("/api/status", dependencies=[Depends(check_token)])
    def get_status():
        return session.status()

    @app.get("/api/candidates", dependencies=[Depends(check_token)])
    def get_candidates(stratum: str = "ambiguous", limit: int = 20):
        if stratum not in STRATA:
            raise HTTPException(status_code=422, detail=f"unknown stratum {stratum!r}")
        with session.lock:
            items = session.candidate_items(stratum, limit)
        return {"stratum": stratum, "items": items, "model_version": session.model_version}

    @app.post("/api/verdicts", dependencies=[Depends(check_token)])
    def post_verdict(request: VerdictRequest):
        with session.lock:
            # checked under the lock so a verdict can never interleave
            # with the retrain worker's label snapshot
            if session.retraining:
                return JSONResponse(
                    status_code=423, content={"error": "busy", "message": "retraining"}
                )
            if (
                request.model_version is not None
                and request.model_version != session.model_version
            ):
                return JSONResponse(
                    status_code=409,
                    content={
                        "error": "stale_model",
                        "message": "model version changed; refresh the candidate queue",
                        "model_version": session.model_version,
                    },
                )
            already = request.verdict_id in session.applied_verdicts
            record = session._apply_verdict_locked(
                request.verdict_id, request.node, request.cls, request.operator
            )
            counts = session.labels.counts()
        status = "already-applied" if already else record.status
        return {
            "status": status,
            "verdict_id": record.verdict_id,
            "label_counts": counts,
        }

    @app.post("/api/retrain", dependencies=[Depends(check_token)])
    def post_retrain():
        with session.lock:
            if session.retraining:
                return JSONResponse(
                    status_code=423,
                    content={"error": "busy", "message": "retrain already in flight"},
                )
            session.retraining = True
        worker = threading.Thread(target=session._retrain_worker, daemon=True)
        worker.start()
        return {"status": "retraining", "iteration": session.iteration}

    @app.get("/api/curves", dependencies=[Depends(check_token)])
    def get_curves():
        return {
            "iterations": [
                {"iteration": it, "curve": [[t, f] for t, f in session.curves[it]]}
                for it in sorted(session.curves)
            ]
        }

    @app.get("/api/metrics/{segment}", dependencies=[Depends(check_token)])
    def get_metrics(segment: str):
        with session.lock:
            totals = compute_totals(session.graph, session.labels)
            if segment.startswith("keyword:"):
                spec = SegmentSpec(keyword=segment.split(":", 1)[1])
            else:
                spec = SegmentSpec(category=segment)
            try:
                report = segment_report(
                    session.graph, session.labels, spec, totals,
                    replicates=session.metrics_replicates, seed=session.base_config.seed,
                )
            except EmptySegmentError as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc
        return report.as_row()

    return app


def serve(session: LabelSession, host: str, port: int, token: str | None = None,
          ui_dir: str | None = None) -> None:
    import uvicorn

    app = create_app(session, token=token)
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port, log_level="info")
