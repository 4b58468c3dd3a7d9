"""Command-line front end: ``twistcon {finite,free,stallings,vab,artin,demos}``.

Experiments are described by a flat ``key = value`` config file (``#`` starts
a comment).  Every run writes its series files plus ``summary.json`` into the
output directory.  Exit codes: 0 success, 1 configuration error, 2 invariant
violation, failed demo criterion or cap exceeded (partial results written).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import artin as ar
from . import demos
from . import density as dn
from . import finite_groups as fg
from . import stallings as st
from . import virtually_abelian as va
from .free_words import FreeEndo, Word

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2

PATH_KEYS = ("cayley", "endo_file", "file")
COMMON_KEYS = {"estimator", "radius", "schedule", "name"}
KEYS = {
    "finite": COMMON_KEYS | {"group", "cayley", "endo", "endo_file", "m"},
    "free": COMMON_KEYS | {"rank", "endo", "conj_radius_factor"},
    "stallings": COMMON_KEYS | {"subgroup", "rank", "m", "k"},
    "vab": COMMON_KEYS | {"fixture", "file", "endo", "prime_bound", "norm"},
    "artin": COMMON_KEYS | {"m"},
    "demos": {"only"},
}


class ConfigError(Exception):
    pass


def load_config(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    cfg = parse_config(text)
    # file references are relative to the config file
    for key in PATH_KEYS:
        if key in cfg and not Path(cfg[key]).is_absolute():
            cfg[key] = str(Path(path).parent / cfg[key])
    return cfg


def parse_config(text: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        ln = raw.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in ln.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in cfg:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        cfg[key] = value
    if not cfg:
        raise ConfigError("config is empty")
    return cfg


def parse_schedule(text: str) -> list[int]:
    """``"1..200"``, ``"0..400:50"`` or ``"10, 20, 40"``; strictly increasing."""
    text = text.strip()
    try:
        if ".." in text:
            lo, rest = text.split("..", 1)
            hi, _, step = rest.partition(":")
            radii = list(range(int(lo), int(hi) + 1, int(step) if step else 1))
        else:
            radii = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad schedule {text!r}") from None
    if not radii or radii[0] < 0:
        raise ConfigError("schedule must be non-empty with radii >= 0")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("schedule must be strictly increasing")
    return radii


def _int(cfg: dict, key: str, default: int | None = None, minimum: int = 0) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        v = int(cfg[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {cfg[key]!r}") from None
    if v < minimum:
        raise ConfigError(f"{key} must be >= {minimum}")
    return v


def _radii(cfg: dict, default: int) -> list[int]:
    if "schedule" in cfg and "radius" in cfg:
        raise ConfigError("give either 'radius' or 'schedule', not both")
    if "schedule" in cfg:
        return parse_schedule(cfg["schedule"])
    return list(range(_int(cfg, "radius", default) + 1))


def _choice(cfg: dict, key: str, options: tuple[str, ...], default: str) -> str:
    v = cfg.get(key, default)
    if v not in options:
        raise ConfigError(f"{key} must be one of {', '.join(options)}; got {v!r}")
    return v


# --- report bundle ------------------------------------------------------------


@dataclass
class ReportBundle:
    out: Path
    files: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def write(self, name: str, text: str) -> None:
        """Atomic write: temp file in the target directory, then rename."""
        self.out.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.out, prefix=f".{name}.")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, self.out / name)
        if name not in self.files:
            self.files.append(name)

    def add_series(self, stem: str, series: dn.EstimateSeries, radii: list[int] | None = None) -> dn.EstimateSeries:
        if radii is not None:
            keep = set(radii)
            series = dn.EstimateSeries([e for e in series.entries if e.n in keep], series.metadata)
        self.write(f"{stem}.csv", series.to_csv())
        self.write(f"{stem}.json", series.to_json())
        plot = io.StringIO()
        plot.write(f"# x: radius n; y: {series.metadata.get('estimator', 'ratio')} ratio\n")
        w = csv.writer(plot, lineterminator="\n")
        w.writerow(["n", "ratio_decimal"])
        for e in series.entries:
            w.writerow([e.n, f"{float(e.ratio):.12g}"])
        self.write(f"{stem}.plot.csv", plot.getvalue())
        if series.entries:
            last = series.last()
            self.summary.setdefault("series", {})[stem] = {
                "n": last.n,
                "ratio": str(last.ratio),
                "ratio_decimal": f"{float(last.ratio):.12g}",
                "top_quartile_max": str(series.top_quartile_max()),
                "flags": list(last.flags),
            }
        return series


def _provenance(command: str, cfg: dict, cap: int, jobs: int, wall: float) -> dict:
    import numpy
    import scipy

    canon = json.dumps({"command": command, "config": cfg, "cap": cap}, sort_keys=True)
    return {
        "config_hash": hashlib.sha256(canon.encode()).hexdigest(),
        "versions": {
            "twistcon": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
        "jobs": jobs,
        "wall_time_s": round(wall, 3),
    }


# --- commands -----------------------------------------------------------------


def _series_with_cap(fn, radii: list[int], cap: int):
    """Run fn(n_max, cap); on a cap overflow rerun at the largest completed radius."""
    try:
        return fn(radii[-1], cap), None
    except (dn.BallCapExceeded,) as exc:
        done = exc.completed_radius
        return fn(done, cap), f"cap {cap} exceeded beyond radius {done}"


def cmd_finite(cfg: dict, b: ReportBundle, cap: int, jobs: int) -> str | None:
    if "cayley" in cfg:
        try:
            F = fg.load_cayley(Path(cfg["cayley"]).read_text(), name=Path(cfg["cayley"]).stem)
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg['cayley']}: {exc.strerror}") from None
        except fg.InvalidGroup as exc:
            raise ConfigError(f"invalid Cayley table: {exc}") from None
    elif "group" in cfg:
        groups = fg.corpus()
        if cfg["group"] not in groups:
            raise ConfigError(f"unknown group {cfg['group']!r}; known: {', '.join(groups)}")
        F = groups[cfg["group"]]
    else:
        raise ConfigError("need 'group' or 'cayley'")
    if "endo_file" in cfg:
        try:
            phi = fg.load_endo(Path(cfg["endo_file"]).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load endomorphism: {exc}") from None
        ename = Path(cfg["endo_file"]).stem
    else:
        ename = cfg.get("endo", "id")
        named = fg.named_endos(F)
        if ename not in named:
            raise ConfigError(f"unknown endomorphism {ename!r}; known: {', '.join(named)}")
        phi = named[ename]
    try:
        fg.validate_endo(F, phi)
    except fg.InvalidEndomorphism as exc:
        raise ConfigError(str(exc)) from None
    est = _choice(cfg, "estimator", ("tdc", "tcr", "extension-check"), "tdc")
    s = b.summary
    s.update({"group": F.name, "order": F.order, "endomorphism": ename})
    if est == "extension-check":
        m = _int(cfg, "m", minimum=1)
        try:
            ok = fg.extension_conjugacy_correspondence(F, phi, m)
        except fg.InvalidEndomorphism as exc:
            raise ConfigError(str(exc)) from None
        G = fg.semidirect_extension(F, phi, m)
        s.update({"m": m, "correspondence": ok, "extension_classes": fg.conjugacy_classes(G).class_count})
        b.write("extension.cayley", fg.dump_cayley(G))
        if not ok:
            raise dn.InvariantViolation("extension correspondence failed")
        return None
    R = fg.reidemeister(F, phi)
    s.update({"reidemeister": R, "tdc_exact": str(fg.tdc_finite(F, phi)), "tcr_exact": str(Fraction(R, F.order))})
    radii = _radii(cfg, F.order)
    o = dn.FiniteGroupOracle(F)
    if est == "tdc":
        series, note = _series_with_cap(lambda n, c: dn.tdc_series(o, phi, n, cap=c, jobs=jobs, phi_id=ename), radii, cap)
    else:
        series, note = _series_with_cap(lambda n, c: dn.tcr_series(o, phi, n, cap=c, phi_id=ename), radii, cap)
    last = series.last()
    full = F.order**2 if est == "tdc" else F.order
    if last.denominator == full and last.ratio != Fraction(R, F.order):
        raise dn.InvariantViolation(f"saturated {est} ratio {last.ratio} != R/|F| = {Fraction(R, F.order)}")
    b.add_series(est, series, radii)
    return note


def cmd_free(cfg: dict, b: ReportBundle, cap: int, jobs: int) -> str | None:
    rank = _int(cfg, "rank", 2, minimum=1)
    try:
        phi = FreeEndo.parse(cfg.get("endo", ""), rank) if cfg.get("endo") else FreeEndo.identity(rank)
    except ValueError as exc:
        raise ConfigError(f"bad endomorphism: {exc}") from None
    est = _choice(cfg, "estimator", ("tdc", "tcr", "growth"), "tdc")
    radii = _radii(cfg, 4)
    o = dn.FreeGroupOracle(rank)
    b.summary.update({"group": o.name, "endomorphism": str(phi)})
    if est == "growth":
        ball = dn.build_ball(o, radii[-1], cap)
        counts = [ball.size(n) for n in range(ball.radius + 1)]
        rate, degree = dn.growth_rate(counts)
        buf = io.StringIO()
        buf.write("# x: radius n; y: ball size\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "ball_size"])
        for n in radii:
            w.writerow([n, counts[n]])
        b.write("growth.csv", buf.getvalue())
        b.summary.update({"growth_rate": f"{rate:.12g}", "degree": f"{degree:.12g}"})
        return None
    if est == "tdc":
        series, note = _series_with_cap(lambda n, c: dn.tdc_series(o, phi, n, cap=c, jobs=jobs, phi_id=str(phi)), radii, cap)
    else:
        f = _int(cfg, "conj_radius_factor", 2, minimum=0)
        series, note = _series_with_cap(
            lambda n, c: dn.tcr_series(o, phi, n, lambda r: f * r, cap=c, phi_id=str(phi)), radii, cap
        )
    b.add_series(est, series, radii)
    return note


def cmd_stallings(cfg: dict, b: ReportBundle, cap: int, jobs: int) -> str | None:
    est = _choice(cfg, "estimator", ("core", "gamma_k"), "core" if "subgroup" in cfg else "gamma_k")
    if est == "gamma_k":
        m, k = _int(cfg, "m", minimum=2), _int(cfg, "k", minimum=2)
        cands = st.gamma_k_candidates(m, k)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["candidate", "vertices", "edges", "entropy"])
        for name, U, rho in cands:
            w.writerow([name, U.num_vertices, len(U.edges), f"{rho:.12g}"])
        b.write("gamma_k.csv", buf.getvalue())
        g = st.gamma_k(m, k)
        b.summary.update({"m": m, "k": k, "gamma_k": f"{g:.12g}", "gap": f"{2 * m - 1 - g:.12g}"})
        return None
    words = [w.strip() for w in cfg.get("subgroup", "").split(",") if w.strip()]
    if not words:
        raise ConfigError("'subgroup' needs at least one word")
    try:
        rank = _int(cfg, "rank", 0) or max(Word.parse(w).rank for w in words)
        gens = [Word.parse(w, rank) for w in words]
    except ValueError as exc:
        raise ConfigError(f"bad subgroup word: {exc}") from None
    C = st.core_graph(gens)
    b.write("core.txt", st.dump_graph(C))
    b.write("core.dot", st.to_dot(C))
    s = b.summary
    s.update(
        {
            "subgroup": words,
            "vertices": C.num_vertices,
            "edges": len(C.edges),
            "degrees": C.degrees(),
            "finite_index": st.has_finite_index(C),
            "index": C.num_vertices if st.has_finite_index(C) else None,
            "subgroup_rank": st.subgroup_rank(C),
        }
    )
    if st.subgroup_rank(C) >= 2:
        T = st.topologize(st.underlying(C))
        s["topological_graph"] = {"vertices": T.num_vertices, "edges": len(T.edges)}
        s["entropy"] = f"{st.entropy(st.underlying(C)):.12g}"
    return None


def _va_pair(cfg: dict) -> tuple[va.VAGroup, va.VAEndo, str]:
    if "file" in cfg:
        try:
            G, endos = va.load_vagroup(cfg["file"])
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg['file']}: {exc.strerror}") from None
        except va.VAParseError as exc:
            raise ConfigError(f"{cfg['file']}: {exc}") from None
        name = cfg.get("endo", "id")
        if name == "id" and "id" not in endos:
            return G, va.VAEndo.identity(G), "id"
        if name not in endos:
            raise ConfigError(f"endomorphism {name!r} not declared in {cfg['file']}")
        return G, endos[name], name
    fx = va.fixtures()
    key = cfg.get("fixture")
    if key is None:
        raise ConfigError("need 'fixture' or 'file'")
    if key not in fx:
        raise ConfigError(f"unknown fixture {key!r}; known: {', '.join(fx)}")
    G, phi = fx[key]
    return G, phi, key


def cmd_vab(cfg: dict, b: ReportBundle, cap: int, jobs: int) -> str | None:
    G, phi, pid = _va_pair(cfg)
    est = _choice(cfg, "estimator", ("tdc", "tcr", "quotient-sequence", "lattice"), "tdc")
    verdict, witness = va.tdc_positive_criterion(G, phi)
    s = b.summary
    s.update(
        {
            "group": G.name,
            "endomorphism": pid,
            "criterion": verdict,
            "witness": G.Q.label(witness) if witness is not None else None,
            "tcr_lower_bound": str(va.tcr_lower_bound(G, phi)),
            "dl_exponent": va.dl_exponent(G, phi),
        }
    )
    if est == "quotient-sequence":
        bound = _int(cfg, "prime_bound", 30, minimum=2)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "order", "reidemeister", "tdc", "in_P"])
        P = va.prime_set_P(G, phi, bound)
        rows = []
        for p in va.primes_upto(bound):
            try:
                F, pb = va.quotient_mod_p(G, phi, p)
            except ValueError:
                break
            t = fg.tdc_finite(F, pb)
            w.writerow([p, F.order, fg.reidemeister(F, pb), str(t), p in P])
            rows.append((p, t))
            if p in P and t > Fraction(1, p):
                raise dn.InvariantViolation(f"quotient mod {p} has tdc {t} > 1/{p}")
        b.write("quotients.csv", buf.getvalue())
        s["P"] = P
        s["quotients"] = {str(p): str(t) for p, t in rows}
        return None
    radii = _radii(cfg, 50)
    if est == "lattice":
        if G.m != 1:
            raise ConfigError("lattice estimator needs a pure lattice (trivial Q)")
        norm = _choice(cfg, "norm", ("l1", "linf"), "l1")
        counts = va.lattice_class_counts(phi.M, radii[-1], norm)
        buf = io.StringIO()
        buf.write(f"# x: radius n ({norm}); y: twisted classes meeting the ball\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "classes"])
        for n in radii:
            w.writerow([n, counts[n]])
        b.write("lattice.csv", buf.getvalue())
        s["classes"] = counts[radii[-1]]
        return None
    o = va.VAOracle(G)
    if est == "tdc":
        series, note = _series_with_cap(lambda n, c: dn.tdc_series(o, phi, n, cap=c, jobs=jobs, phi_id=pid), radii, cap)
    else:
        series, note = _series_with_cap(lambda n, c: dn.tcr_series(o, phi, n, cap=c, phi_id=pid), radii, cap)
    b.add_series(est, series, radii)
    return note


def cmd_artin(cfg: dict, b: ReportBundle, cap: int, jobs: int) -> str | None:
    m = _int(cfg, "m", 3, minimum=3)
    if m % 2 == 0:
        raise ConfigError("m must be odd")
    radii = _radii(cfg, 50)
    n_max = radii[-1]
    if n_max < 1:
        raise ConfigError("artin needs radius >= 1")
    series, g = ar.tcr_upper_series(m, n_max)
    keep = set(radii)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "g", "g_over_2n", "bound_1_over_2n"])
    for e in series.entries:
        if e.n in keep:
            w.writerow([e.n, g[e.n], str(Fraction(g[e.n], 2 * e.n)), str(e.ratio)])
    b.write("artin.csv", buf.getvalue())
    rate, _ = dn.growth_rate([x for x in g if x] or [1])
    b.summary.update({"m": m, "n_max": n_max, "g_n_max": str(g[n_max]), "bound": str(series.last().ratio)})
    b.summary["g_ratio_last"] = f"{rate:.12g}"
    return None


def cmd_demos(cfg: dict, b: ReportBundle, cap: int, jobs: int) -> str | None:
    only = None
    if "only" in cfg:
        try:
            only = [int(x) for x in cfg["only"].replace(",", " ").split()]
        except ValueError:
            raise ConfigError("'only' must list criterion numbers") from None
        known = {n for n, _, _ in demos.CRITERIA}
        if not set(only) <= known:
            raise ConfigError(f"unknown criteria {sorted(set(only) - known)}")
    results = demos.run_demos(only, jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["criterion", "title", "verdict"])
    for r in results:
        w.writerow([r.number, r.title, "pass" if r.passed else "fail"])
        print(r.line())
    b.write("demos.csv", buf.getvalue())
    b.summary["criteria"] = {
        str(r.number): {"title": r.title, "passed": r.passed, "details": _jsonable(r.details)} for r in results
    }
    failed = [r.number for r in results if not r.passed]
    if failed:
        raise dn.InvariantViolation(f"criteria failed: {failed}")
    return None


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return x


COMMANDS = {
    "finite": cmd_finite,
    "free": cmd_free,
    "stallings": cmd_stallings,
    "vab": cmd_vab,
    "artin": cmd_artin,
    "demos": cmd_demos,
}


def run(command: str, cfg: dict, out: Path, cap: int = dn.DEFAULT_CAP, jobs: int = 1) -> tuple[ReportBundle, int]:
    """Execute one experiment; returns the bundle and the process exit code."""
    unknown = set(cfg) - KEYS[command]
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {', '.join(sorted(unknown))}")
    b = ReportBundle(Path(out))
    b.summary["command"] = command
    b.summary["config"] = dict(sorted(cfg.items()))
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        note = COMMANDS[command](cfg, b, cap, jobs)
        if note:
            b.summary["partial"] = note
            code = EXIT_INVARIANT
    except (dn.InvariantViolation, va.InvalidVAGroup) as exc:
        b.summary["error"] = str(exc)
        code = EXIT_INVARIANT
    except dn.BallCapExceeded as exc:
        b.summary["partial"] = str(exc)
        code = EXIT_INVARIANT
    b.summary["exit_code"] = code
    b.summary["provenance"] = _provenance(command, cfg, cap, jobs, time.perf_counter() - t0)
    b.summary["files"] = sorted(b.files)
    b.write("summary.json", json.dumps(_jsonable(b.summary), indent=2, sort_keys=True) + "\n")
    return b, code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistcon", description="Twisted conjugacy experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="flat key = value experiment file")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--cap", type=int, default=dn.DEFAULT_CAP, help="maximum ball size")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for pair counting")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cap < 1 or args.jobs < 1:
            raise ConfigError("--cap and --jobs must be positive")
        if args.config is None:
            if args.command != "demos":
                raise ConfigError(f"{args.command} needs --config")
            cfg = {}
        else:
            cfg = load_config(args.config)
        b, code = run(args.command, cfg, args.out, args.cap, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    msg = b.summary.get("error") or b.summary.get("partial")
    if msg:
        print(f"{args.command}: {msg}", file=sys.stderr)
    print(f"wrote {len(b.files)} files to {b.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
