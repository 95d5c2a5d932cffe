"""Command-line entry points.

    pitchside simulate --config FILE [--seed N]
    pitchside setplay check FILE
    pitchside setplay fmt FILE [-w]
    pitchside trials --setplay FILE --scenario FILE -n N --seed S [--report OUT]
    pitchside stats LOG [--record]
    pitchside optimize --objective NAME [--config FILE] [--history OUT] [--plot OUT.png]
    pitchside serve --addr HOST:PORT
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import sexpr
from .runner import parse_match_config, parse_scenario, run_match, run_trials
from .search import (
    ContextualPolicy,
    GaussianSearchState,
    SearchConfig,
    optimize,
    optimize_contextual,
)
from .setplay import parse_setplay, print_setplay, validate_setplay
from .sexpr import FormWalker, ParseError
from .sim import SimConfig, sample_kick_outcome
from .stats import analyze_log, render_record, render_report


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def cmd_simulate(args) -> int:
    try:
        config = parse_match_config(_read(args.config), os.path.dirname(os.path.abspath(args.config)))
    except (OSError, ParseError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        config.seed = args.seed
    path = run_match(config)
    print(f"match log written to {path}")
    return 0


def cmd_setplay(args) -> int:
    try:
        source = _read(args.file)
        ast = parse_setplay(source)
    except OSError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return 1
    if args.action == "check":
        diagnostics = validate_setplay(ast)
        for d in diagnostics:
            print(f"{args.file}: {d}")
        if not diagnostics:
            print(f"{args.file}: ok ({len(ast.steps)} steps, {len(ast.participants)} roles)")
        return 1 if diagnostics else 0
    formatted = print_setplay(ast)
    if args.write:
        with open(args.file, "w") as fh:
            fh.write(formatted)
    else:
        sys.stdout.write(formatted)
    return 0


def cmd_trials(args) -> int:
    try:
        setplay_text = _read(args.setplay)
        scenario = parse_scenario(_read(args.scenario))
        report = run_trials(setplay_text, scenario, args.n, args.seed)
    except (OSError, ParseError) as exc:
        print(exc, file=sys.stderr)
        return 1
    print(f"setplay {report.setplay_id}: {report.rate_text()}")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.render())
    return 0


def cmd_stats(args) -> int:
    try:
        events, stats = analyze_log(_read(args.log))
    except Exception as exc:
        print(f"{args.log}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render_record(stats) if args.record else render_report(stats))
    return 0


def _search_config(path: str | None) -> SearchConfig:
    if path is None:
        return SearchConfig()
    w = FormWalker(sexpr.parse_one(_read(path)), "search")
    w.require_head("search")
    return SearchConfig(
        epsilon=float(w.keyword("epsilon", default=0.5)),
        samples_per_iteration=int(w.keyword("samples", default=20)),
        elite_temperature=float(w.keyword("temperature", default=0.3)),
        max_iterations=int(w.keyword("iterations", default=300)),
        seed=int(w.keyword("seed", default=0)),
    )


def _kick_calibration_history(config: SearchConfig):
    """Contextual tuning of the kick's spread knobs against the simulator.

    Contexts are desired kick distances sampled uniformly from the
    contextual range; each parameter sample is evaluated 5 times on the
    noisy simulator kick and averaged; fitness is the negated absolute
    radial error.  (20 samples per iteration by default.)"""
    sim = SimConfig()
    noise = np.random.default_rng(config.seed + 1)

    def objective(context: float, params: np.ndarray) -> float:
        r_sigma, a_sigma = abs(float(params[0])), abs(float(params[1]))
        dx, dy = sample_kick_outcome(
            context, 0.0, noise, sim, radial_sigma=r_sigma, angle_sigma_deg=a_sigma
        )
        return -abs(float(np.hypot(dx, dy)) - context)

    policy = ContextualPolicy(
        weight_matrix=np.array([[0.4, 2.0], [0.0, 0.0], [0.0, 0.0]]),
        covariance=np.eye(2) * 0.01,
    )
    sampler = lambda rng: float(rng.uniform(sim.kick_min, sim.kick_max))  # noqa: E731
    _, history = optimize_contextual(objective, policy, config, sampler, evaluations_per_sample=5)
    return history


def cmd_optimize(args) -> int:
    config = _search_config(args.config)
    if args.objective == "sphere5":
        init = GaussianSearchState(mean=np.full(5, 5.0), covariance=np.eye(5))
        result = optimize(lambda x: -float(np.sum(x * x)), init, config)
        history = result.history
        print(f"best fitness {result.best_fitness:.6g} after {len(history)} iterations")
    elif args.objective == "rastrigin3":
        def rastrigin(x):
            return -float(10 * len(x) + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))

        init = GaussianSearchState(mean=np.full(3, 3.0), covariance=np.eye(3))
        result = optimize(rastrigin, init, config)
        history = result.history
        print(f"best fitness {result.best_fitness:.6g} after {len(history)} iterations")
    elif args.objective == "contextual-linear":
        policy = ContextualPolicy(weight_matrix=np.zeros((3, 1)), covariance=np.eye(1))
        policy, history = optimize_contextual(
            lambda s, x: -float((x[0] - 2.0 * s) ** 2),
            policy,
            config,
            lambda rng: float(rng.uniform(0.0, 1.0)),
        )
        errs = [abs(policy.mean(s)[0] - 2.0 * s) for s in np.linspace(0, 1, 21)]
        print(f"max |mean(s) - 2s| = {max(errs):.4g} after {len(history)} iterations")
    elif args.objective == "kick-calibration":
        history = _kick_calibration_history(config)
        print(f"kick calibration protocol ran {len(history)} iterations x "
              f"{config.samples_per_iteration} contexts (5 evaluations each)")
    else:
        print(f"unknown objective {args.objective!r}; choose from: "
              f"sphere5, rastrigin3, contextual-linear, kick-calibration", file=sys.stderr)
        return 1

    if args.history:
        with open(args.history, "w") as fh:
            fh.write("\n".join(r.line() for r in history) + "\n")
        print(f"history written to {args.history}")
    if args.plot:
        _plot_history(history, args.plot)
        print(f"convergence plot written to {args.plot}")
    return 0


def _plot_history(history, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    iterations = [r.iteration for r in history]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(iterations, [r.best_fitness for r in history], label="best")
    ax1.plot(iterations, [r.mean_fitness for r in history], label="population mean")
    ax1.set_ylabel("fitness")
    ax1.legend()
    ax2.plot(iterations, [r.kl_spent for r in history], color="tab:red")
    ax2.set_ylabel("KL spent (nats)")
    ax2.set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.partition(":")
    app = create_app(state_dir=args.state_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8900), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pitchside")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a full match from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("setplay", help="check or format a setplay file")
    p.add_argument("action", choices=["check", "fmt"])
    p.add_argument("file")
    p.add_argument("-w", "--write", action="store_true", help="fmt: rewrite the file in place")
    p.set_defaults(func=cmd_setplay)

    p = sub.add_parser("trials", help="run seeded setplay trials in a scenario")
    p.add_argument("--setplay", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--report", help="write the trial report to this file")
    p.set_defaults(func=cmd_trials)

    p = sub.add_parser("stats", help="extract statistics from a match log")
    p.add_argument("log")
    p.add_argument("--record", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("optimize", help="run the stochastic search on a named objective")
    p.add_argument("--objective", required=True)
    p.add_argument("--config", help="search config file")
    p.add_argument("--history", help="write iteration history to this file")
    p.add_argument("--plot", help="render a convergence plot to this file")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("serve", help="serve the designer gateway")
    p.add_argument("--addr", default="127.0.0.1:8900")
    p.add_argument("--state-dir", default=".pitchside")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
