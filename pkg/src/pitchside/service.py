"""Designer gateway: a thin HTTP adapter over the core operations.

Every endpoint answers with exactly what the corresponding library call
produces (the core is the oracle); request and response bodies are the
same S-expression documents the file formats use.  Long-running trial
batches run as background jobs with polled progress; live per-cycle match
records stream over a websocket for playback.

    GET/PUT /formations/{name}
    POST    /interpolate        (interpolate :ball (x y) (strategic-map ...))
    POST    /setplay/validate
    POST    /setplay/fmt
    POST    /trials             (trials :n N :seed S (setplay ...) (scenario ...))
    GET     /jobs/{id}
    GET     /logs/{id}
    GET     /stats/{id}
    WS      /live/{job_id}
"""

from __future__ import annotations

import asyncio
import threading
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from . import sexpr
from .formation import load_formation, parse_strategic_map, print_formation
from .runner import Scenario, parse_scenario, run_scenario, trial_seeds, TrialReport
from .setplay import parse_setplay, print_setplay, validate_setplay
from .sexpr import FormWalker, ParseError, fmt_coord
from .stats import analyze_log, render_record


@dataclass
class Job:
    id: int
    kind: str
    state: str = "running"  # running | done | error | canceled
    progress: float = 0.0
    report: TrialReport | None = None
    error: str = ""
    log_lines: list[str] = field(default_factory=list)
    cancel_requested: bool = False


class JobRegistry:
    """Single synchronized map guarding all job state."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[int, Job] = {}
        self._next = 1

    def create(self, kind: str) -> Job:
        with self._lock:
            job = Job(id=self._next, kind=kind)
            self._jobs[job.id] = job
            self._next += 1
            return job

    def get(self, job_id: int) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)


def _parse_error(exc: ParseError) -> HTTPException:
    body = f"(error :line {exc.line} :col {exc.col} :message {sexpr.dumps(sexpr.Text(exc.message))})"
    return HTTPException(status_code=400, detail=body)


def create_app(state_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="pitchside gateway")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    formations: dict[str, str] = {}  # name -> canonical document
    jobs = JobRegistry()

    @app.get("/formations/{name}", response_class=PlainTextResponse)
    def get_formation(name: str) -> str:
        if name not in formations:
            raise HTTPException(status_code=404, detail=f"(error :message \"no formation {name}\")")
        return formations[name]

    @app.put("/formations/{name}", response_class=PlainTextResponse)
    def put_formation(name: str, body: str = Body(..., media_type="text/plain")) -> str:
        try:
            formation = load_formation(body)
        except ParseError as exc:
            raise _parse_error(exc) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"(error :message {sexpr.dumps(sexpr.Text(str(exc)))})")
        formations[name] = print_formation(formation)
        return f"(ok :name {name})"

    @app.post("/interpolate", response_class=PlainTextResponse)
    def interpolate(body: str = Body(..., media_type="text/plain")) -> str:
        try:
            form = sexpr.parse_one(body)
            w = FormWalker(form, "interpolate")
            w.require_head("interpolate")
            ball = w.keyword("ball")
            maps = w.sublists("strategic-map")
            if len(maps) != 1:
                raise ParseError("interpolate needs exactly one (strategic-map ...)", 1, 1)
            smap = parse_strategic_map(maps[0])
        except ParseError as exc:
            raise _parse_error(exc) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"(error :message {sexpr.dumps(sexpr.Text(str(exc)))})")
        targets = smap.interpolate((float(ball[0]), float(ball[1])))
        inner = " ".join(f"({fmt_coord(x)} {fmt_coord(y)})" for x, y in targets)
        return f"(targets {inner})\n"

    @app.post("/setplay/validate", response_class=PlainTextResponse)
    def setplay_validate(body: str = Body(..., media_type="text/plain")) -> str:
        try:
            ast = parse_setplay(body)
        except ParseError as exc:
            raise _parse_error(exc) from exc
        diagnostics = validate_setplay(ast)
        inner = "".join(
            f" ({d.code} {sexpr.dumps(sexpr.Text(d.message))})" for d in diagnostics
        )
        return f"(diagnostics{inner})\n"

    @app.post("/setplay/fmt", response_class=PlainTextResponse)
    def setplay_fmt(body: str = Body(..., media_type="text/plain")) -> str:
        try:
            return print_setplay(parse_setplay(body))
        except ParseError as exc:
            raise _parse_error(exc) from exc

    def _run_trials_job(job: Job, setplay_text: str, scenario: Scenario, n: int, seed: int):
        try:
            ast = parse_setplay(setplay_text)
            diagnostics = validate_setplay(ast)
            if diagnostics:
                job.state = "error"
                job.error = "; ".join(str(d) for d in diagnostics)
                return
            seeds = trial_seeds(seed, n)
            outcomes = []
            for i, s in enumerate(seeds):
                if job.cancel_requested:
                    job.state = "canceled"
                    return
                result = run_scenario(
                    scenario, s, setplays_enabled=True,
                    setplay_library={ast.id: ast}, keep_log=(i == 0),
                )
                if i == 0 and result.log_text:
                    job.log_lines = result.log_text.splitlines()
                outcomes.append(result.finish_reached and result.predicate_holds)
                job.progress = (i + 1) / max(n, 1)
            job.report = TrialReport(
                setplay_id=ast.id, trials=n, successes=sum(outcomes),
                per_trial_seeds=seeds, per_trial_success=outcomes,
            )
            job.progress = 1.0
            job.state = "done"
        except Exception as exc:  # surfaced via the job record
            job.state = "error"
            job.error = str(exc)

    @app.post("/trials", response_class=PlainTextResponse)
    def post_trials(body: str = Body(..., media_type="text/plain")) -> str:
        try:
            form = sexpr.parse_one(body)
            w = FormWalker(form, "trials")
            w.require_head("trials")
            n = int(w.keyword("n"))
            seed = int(w.keyword("seed"))
            setplays = w.sublists("setplay")
            scenarios = w.sublists("scenario")
            if len(setplays) != 1 or len(scenarios) != 1:
                raise ParseError("trials needs one (setplay ...) and one (scenario ...)", 1, 1)
            scenario = parse_scenario(sexpr.dumps(scenarios[0]))
            setplay_text = sexpr.dumps(setplays[0])
        except ParseError as exc:
            raise _parse_error(exc) from exc
        job = jobs.create("trials")
        thread = threading.Thread(
            target=_run_trials_job, args=(job, setplay_text, scenario, n, seed), daemon=True
        )
        thread.start()
        return f"(job :id {job.id})\n"

    def _job_or_404(job_id: int) -> Job:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"(error :message \"no job {job_id}\")")
        return job

    @app.get("/jobs/{job_id}", response_class=PlainTextResponse)
    def get_job(job_id: int) -> str:
        job = _job_or_404(job_id)
        parts = [f"(job :id {job.id} :kind {job.kind} :state {job.state} :progress {job.progress:.4f}"]
        if job.state == "error":
            parts.append(f" :error {sexpr.dumps(sexpr.Text(job.error))}")
        if job.report is not None:
            parts.append("\n  " + job.report.render().strip())
        return "".join(parts) + ")\n"

    @app.post("/jobs/{job_id}/cancel", response_class=PlainTextResponse)
    def cancel_job(job_id: int) -> str:
        job = _job_or_404(job_id)
        job.cancel_requested = True
        return f"(ok :id {job.id})\n"

    @app.get("/logs/{job_id}", response_class=PlainTextResponse)
    def get_log(job_id: int) -> str:
        job = _job_or_404(job_id)
        if not job.log_lines:
            raise HTTPException(status_code=404, detail="(error :message \"job kept no log\")")
        return "\n".join(job.log_lines) + "\n"

    @app.get("/stats/{job_id}", response_class=PlainTextResponse)
    def get_stats(job_id: int) -> str:
        job = _job_or_404(job_id)
        if not job.log_lines:
            raise HTTPException(status_code=404, detail="(error :message \"job kept no log\")")
        _, stats = analyze_log("\n".join(job.log_lines) + "\n")
        return render_record(stats)

    @app.websocket("/live/{job_id}")
    async def live(websocket: WebSocket, job_id: int):
        await websocket.accept()
        job = jobs.get(job_id)
        if job is None:
            await websocket.close(code=4404)
            return
        sent = 0
        try:
            while True:
                lines = job.log_lines
                while sent < len(lines):
                    await websocket.send_text(lines[sent])
                    sent += 1
                if job.state != "running" and sent >= len(job.log_lines):
                    break
                await asyncio.sleep(0.02)
            await websocket.close()
        except WebSocketDisconnect:
            pass

    return app
