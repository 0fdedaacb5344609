"""Command-line interface.

Examples
--------
::

    giantwqed preset fig5a --format csv --out gap.csv
    giantwqed sweep scenario.yaml --grid -5:5:1001 --solver all
    giantwqed ssh --n-atoms 16 --phi1 0.2pi --phi2 0.3pi --epsilon 0.1pi
    giantwqed verify

Set ``GIANTWQED_MAX_WORKERS`` to cap the number of sweep threads.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from giantwqed import kernels
from giantwqed.io import (
    ConfigError,
    Grid,
    Layout,
    OutputFormat,
    ScenarioConfig,
    Solver,
    dump_config,
    dumps_json,
    load_config,
    parse_grid,
    parse_phase,
)
from giantwqed.presets import DESCRIPTIONS, get_preset
from giantwqed.runner import ScenarioResult, run_scenario, verify

log = logging.getLogger("giantwqed")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="output file (stdout if omitted)")
    p.add_argument("--format", choices=[f.value for f in OutputFormat], help="output format")
    p.add_argument("--grid", type=parse_grid, help="detuning grid min:max:count in units of gamma")
    p.add_argument("--solver", choices=[s.value for s in Solver], help="scattering solver")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="giantwqed", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("sweep", "reflection and transmission spectrum of a scenario"),
        ("modes", "collective modes and their Lorentzian weights"),
        ("features", "closed-form and numerical spectral features"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", type=Path, help="scenario YAML file")
        _common(p)

    p = sub.add_parser("ssh", help="probed SSH chain of braided giant atoms")
    p.add_argument("--n-atoms", type=int, default=16)
    p.add_argument("--phi1", type=parse_phase, default=parse_phase("0.2pi"))
    p.add_argument("--phi2", type=parse_phase, default=parse_phase("0.3pi"))
    p.add_argument("--epsilon", type=parse_phase, default=parse_phase("0.1pi"))
    p.add_argument("--gamma", type=float, default=1.0)
    _common(p)

    p = sub.add_parser("verify", help="oracle-equivalence checks")
    p.add_argument("config", type=Path, nargs="?", help="optional scenario to include")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("preset", help="run a named figure preset")
    p.add_argument("id", nargs="?", help="preset id, e.g. fig5a")
    p.add_argument("--list", action="store_true", help="list preset ids")
    p.add_argument("--dump-config", action="store_true", help="print the preset as YAML and exit")
    _common(p)
    return parser


def _apply_overrides(cfg: ScenarioConfig, args, outputs=None) -> ScenarioConfig:
    return cfg.replace(
        sweep=args.grid,
        solver=Solver(args.solver) if args.solver else None,
        format=OutputFormat(args.format) if args.format else None,
        outputs=outputs,
    )


def _render(result: ScenarioResult, fmt: OutputFormat, section: str) -> list[tuple[str, str]]:
    """``(suffix, text)`` chunks; one per scan variant for CSV tables."""
    if fmt is OutputFormat.JSON:
        return [("", dumps_json(result.to_dict()) + "\n")]
    chunks = []
    many = len(result.variants) > 1
    for k, var in enumerate(result.variants):
        suffix = f"_{k:03d}" if many else ""
        if section == "spectrum":
            chunks.append((suffix, var.table.to_csv()))
        elif section == "modes":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["index", "energy_detuning", "decay", "eta_re", "eta_im", "eta_r_re", "eta_r_im"])
            for n, m in enumerate(var.modes or []):
                w.writerow([n + 1] + ["%.12g" % v for v in (
                    m.energy_detuning, m.decay, m.weight_t.real, m.weight_t.imag,
                    m.weight_r.real, m.weight_r.imag)])
            chunks.append((suffix, buf.getvalue()))
        else:
            chunks.append((suffix, dumps_json({"scan": var.scan, "features": var.features}) + "\n"))
    return chunks


def _emit(chunks: list[tuple[str, str]], out: Path | None, multi_label=None) -> None:
    if out is None:
        for k, (_, text) in enumerate(chunks):
            if len(chunks) > 1 and multi_label is not None:
                sys.stdout.write(f"# {multi_label[k]}\n")
            sys.stdout.write(text)
        return
    for suffix, text in chunks:
        path = out.with_name(out.stem + suffix + out.suffix) if suffix else out
        path.write_text(text, encoding="utf-8")
        log.info("wrote %s", path)


def _run(cfg: ScenarioConfig, section: str, args) -> int:
    result = run_scenario(cfg)
    for note in result.notices:
        print(f"notice: {note}", file=sys.stderr)
    labels = [", ".join(f"{k}={v:.12g}" for k, v in var.scan.items()) for var in result.variants]
    _emit(_render(result, cfg.format, section), args.out, labels)
    return 0


def _join_grid(argv: list[str]) -> list[str]:
    # "--grid -5:5:101" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--grid":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--grid={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_grid(list(sys.argv[1:] if argv is None else argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    log.debug("kernel backend %s, max workers %d", kernels.BACKEND, kernels.max_workers())
    try:
        if args.command in ("sweep", "modes", "features"):
            outputs = {"sweep": ("spectrum",), "modes": ("spectrum", "modes"), "features": ("features",)}
            cfg = _apply_overrides(load_config(args.config), args, outputs[args.command])
            section = "spectrum" if args.command == "sweep" else args.command
            return _run(cfg, section, args)
        if args.command == "ssh":
            params = {"n_atoms": args.n_atoms, "phi1": args.phi1, "phi2": args.phi2,
                      "epsilon": args.epsilon, "gamma": args.gamma}
            cfg = ScenarioConfig(Layout("ssh", params), Grid(-1.6, 1.6, 3201),
                                 ("spectrum", "features"), name="ssh")
            cfg = _apply_overrides(cfg, args)
            if cfg.format is OutputFormat.CSV:
                result = run_scenario(cfg)
                print(dumps_json(result.variants[0].features), file=sys.stderr)
                _emit(_render(result, OutputFormat.CSV, "spectrum"), args.out)
                return 0
            return _run(cfg, "spectrum", args)
        if args.command == "verify":
            cfg = load_config(args.config) if args.config else None
            report = verify(cfg, seed=args.seed)
            _emit([("", dumps_json(report) + "\n")], args.out)
            return 0 if report["passed"] else 1
        if args.command == "preset":
            if args.list or not args.id:
                for pid, text in DESCRIPTIONS.items():
                    print(f"{pid:8s} {text}")
                return 0
            cfg = _apply_overrides(get_preset(args.id), args)
            if args.dump_config:
                _emit([("", dump_config(cfg))], args.out)
                return 0
            section = "spectrum" if "spectrum" in cfg.outputs else cfg.outputs[0]
            return _run(cfg, section, args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stderr.close()
        return 0
    except (ConfigError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
