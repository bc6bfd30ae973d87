"""Command-line entry point: ``python3 -m measgeom <command> --config FILE --out DIR``.

Every run writes its artifacts plus ``manifest.json`` (config hash, seed,
timestamps, artifact hashes).  ``replay MANIFEST`` re-runs a manifest into a
scratch directory and checks the artifacts are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .config import ConfigError, ExperimentConfig, config_hash, parse_config_text
from .geometry import GeodesicModel, predict_interval_entropy

COMMANDS = ("calibrate", "collapse", "ads", "btz", "mi", "wedge")


@dataclass
class RunManifest:
    """Provenance of one CLI run."""

    command: str
    config_path: str
    config_sha256: str
    config_text: str
    seed: int
    samples: int
    threads: int
    version: str = __version__
    started: str = ""
    finished: str = ""
    status: str = "running"
    artifacts: dict[str, str] = field(default_factory=dict)
    error: dict | None = None

    def write(self, out: Path) -> None:
        (out / "manifest.json").write_text(json.dumps(asdict(self), indent=2) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _finite(obj):
    # strict JSON has no NaN/inf; write them as null
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _write_json(path: Path, payload) -> None:
    text = json.dumps(_finite(payload), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n")


def _fit_dict(fit) -> dict | None:
    if fit is None:
        return None
    return {"slope": fit.slope, "intercept": fit.intercept, "slope_err": fit.slope_err,
            "intercept_err": fit.intercept_err, "r_squared": fit.r_squared}


def _model_dict(m: GeodesicModel) -> dict:
    return asdict(m)


# -- experiment runners; each returns the list of files it wrote ------------------------


def _calibration(cfg: ExperimentConfig, out: Path, log) -> tuple[ex.Calibration, list[Path]]:
    p = cfg.params
    cal = ex.calibrate_mipt(p["L"], p["rho"], cfg.samples, master_seed=cfg.seed,
                            gate_mix=cfg.gate_mix, threads=cfg.threads, critical=cfg.critical,
                            progress=log)
    files = []
    for L, curve in cal.curves.items():
        f = out / f"calibrate_L{L}.csv"
        curve.to_csv(f)
        files.append(f)
    return cal, files


def run_calibrate(cfg, out, log):
    cal, files = _calibration(cfg, out, log)
    f = out / "calibrate.json"
    _write_json(f, {"fingerprints": {str(L): c.fingerprint for L, c in cal.curves.items()},
                    "crossings": [list(c) for c in cal.crossings()], "rho_c": cal.rho_c()})
    return files + [f]


def run_collapse(cfg, out, log):
    cal, files = _calibration(cfg, out, log)
    res = ex.scaling_collapse(cal.curves, n_bootstrap=cfg.params["bootstrap"],
                              bootstrap_seed=cfg.seed)
    f = out / "collapse.json"
    _write_json(f, {**res.to_dict(), "crossings": [list(c) for c in cal.crossings()],
                    "fingerprints": {str(L): c.fingerprint for L, c in cal.curves.items()}})
    g = out / "collapse_scaled.csv"
    with open(g, "w") as fh:
        fh.write("L,rho,scaled,mean,stderr,n\n")
        for L, c in sorted(cal.curves.items()):
            for r, m, e, n in zip(c.coords, c.mean, c.stderr, c.n):
                x = (r - res.rho_c_fit) * L ** (1 / res.nu_fit)
                fh.write(f"{L},{r:.12g},{x:.12g},{m:.12g},{e:.12g},{int(n)}\n")
    return files + [f, g]


def run_ads(cfg, out, log):
    p = cfg.params
    runs = ex.run_ads(p["L"], p["l"], cfg.samples, master_seed=cfg.seed, truncate=p["truncate"],
                      gate_mix=cfg.gate_mix, threads=cfg.threads, critical=cfg.critical,
                      progress=log)
    prof = ex.ads_profile(p["L"], p["l"], cfg.samples, runs=runs)
    files = []
    for l in p["l"]:
        f = out / f"ads_profile_l{l:g}.csv"
        runs.profiles[l].to_csv(f)
        files.append(f)
    i3 = ex.EnsembleSummary.concat("I3", p["l"], [runs.i3[l] for l in p["l"]], coord_name="l")
    f = out / "ads_i3.csv"
    i3.to_csv(f)
    files.append(f)
    g = out / "ads_overlay.csv"
    sizes = np.arange(1, p["L"] // 2 + 1)
    with open(g, "w") as fh:
        fh.write("l,size,model\n")
        for l, m in prof.models().items():
            for s, v in zip(sizes, predict_interval_entropy(m, sizes, p["L"])):
                fh.write(f"{l:g},{s},{v:.12g}\n")
    files.append(g)
    sidecar = {"fingerprints": {f"{l:g}": runs.profiles[l].fingerprint for l in p["l"]},
               "fit_window": [8, p["L"] // 4],
               "alpha": prof.alpha.tolist(), "alpha_err": prof.alpha_err.tolist(),
               "offset": prof.offset.tolist(), "rel_rms": prof.rel_rms.tolist(),
               "alpha_vs_l": _fit_dict(prof.alpha_fit)}
    if len(p["l"]) >= 3:
        res = ex.ads_i3(p["L"], p["l"], cfg.samples, runs=runs, alpha_fit=prof.alpha_fit)
        sidecar["i3_vs_l"] = _fit_dict(res.i3_fit)
        sidecar["ratio"] = res.ratio
    h = out / "ads.json"
    _write_json(h, sidecar)
    return files + [h]


def _btz(cfg, out, kind, log):
    p = cfg.params
    res = ex.btz_profile(p["L"], p["l"], p["r_h"], kind, cfg.samples, master_seed=cfg.seed,
                         gate_mix=cfg.gate_mix, threads=cfg.threads, critical=cfg.critical,
                         T=p["T"])
    log(f"btz {kind}: s0={res.model.s0:.4g} r={res.model.r:.4g} rel_rms={res.rel_rms:.3g}")
    f = out / "btz_profile.csv"
    res.profile.to_csv(f)
    g = out / "btz_overlay.csv"
    sizes = np.arange(0, p["L"] + 1)
    with open(g, "w") as fh:
        fh.write("size,model\n")
        for s, v in zip(sizes, predict_interval_entropy(res.model, sizes, p["L"])):
            fh.write(f"{s},{v:.12g}\n")
    return res, [f, g]


def run_btz(cfg, out, log):
    res, files = _btz(cfg, out, cfg.params["initial"], log)
    f = out / "btz.json"
    _write_json(f, {"fingerprint": res.profile.fingerprint, "T": cfg.params["T"],
                    "model": _model_dict(res.model), "objective": res.objective,
                    "rel_rms": res.rel_rms, "plateau": res.plateau, "cusp": res.cusp,
                    "fit_window": [4, cfg.params["L"] // 2]})
    return files + [f]


def run_mi(cfg, out, log):
    p = cfg.params
    prof, files = _btz(cfg, out, "volume", log)
    res = ex.btz_mutual_info(p["L"], p["l"], p["r_h"], prof.model, p["separations"],
                             cfg.samples, size=p["size"], master_seed=cfg.seed,
                             gate_mix=cfg.gate_mix, threads=cfg.threads, critical=cfg.critical,
                             T=p["T"])
    f = out / "mi.csv"
    res.measured.to_csv(f)
    g = out / "mi_overlay.csv"
    with open(g, "w") as fh:
        fh.write("separation,model\n")
        for d, v in zip(res.separations, res.predicted):
            fh.write(f"{d},{v:.12g}\n")
    h = out / "mi.json"
    _write_json(h, {"fingerprint": res.measured.fingerprint, "size": res.size,
                    "model": _model_dict(prof.model), "model_crossover": res.model_crossover,
                    "measured_crossover": res.measured_crossover})
    return files + [f, g, h]


def run_wedge(cfg, out, log):
    p = cfg.params
    wm = ex.wedge_experiment(p["L"], p["l"], p["r_h"], p["size"], p["separations"],
                             cfg.samples, master_seed=cfg.seed, gate_mix=cfg.gate_mix,
                             critical=cfg.critical, T=p["T"])
    files = []
    for k, d in enumerate(wm.separations):
        f = out / f"wedge_sep{d}.csv"
        wm.to_csv(f, k)
        files.append(f)
    g = out / "wedge_contours.json"
    wm.contours_json(g)
    h = out / "wedge.json"
    _write_json(h, {"origin": {str(d): wm.origin(d) for d in wm.separations},
                    "regions": {str(d): wm.region_count(k) for k, d in enumerate(wm.separations)},
                    "value_counts": {"0": int(wm.value_counts[0]), "1": int(wm.value_counts[1]),
                                     "2": int(wm.value_counts[2]),
                                     "other": int(wm.value_counts[3])}})
    return files + [g, h]


RUNNERS = {"calibrate": run_calibrate, "collapse": run_collapse, "ads": run_ads,
           "btz": run_btz, "mi": run_mi, "wedge": run_wedge}


# -- driver ------------------------------------------------------------------------------


def execute(command: str, config_path: str, config_text: str, out: Path, seed=None,
            samples=None, threads=None, log=None) -> RunManifest:
    """Run one experiment into ``out``; the manifest is written before and after."""
    log = log or (lambda m: None)
    cfg = parse_config_text(config_text, command)
    if seed is not None:
        cfg.seed = int(seed)
    if samples is not None:
        if samples < 2:
            raise ConfigError("samples must be >= 2", "samples")
        cfg.samples = int(samples)
    if threads is not None:
        cfg.threads = max(1, int(threads))
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest(command, str(config_path), config_hash(config_text), config_text,
                      cfg.seed, cfg.samples, cfg.threads, started=_now())
    man.write(out)
    written: list[Path] = []
    try:
        written = RUNNERS[command](cfg, out, log)
        man.status = "complete"
    except Exception as exc:
        man.status = "partial"
        man.error = {"type": type(exc).__name__, "message": str(exc)}
        written = sorted(p for p in out.iterdir() if p.name != "manifest.json")
        raise
    finally:
        man.artifacts = {p.name: _sha(p) for p in written if p.exists()}
        man.finished = _now()
        man.write(out)
    return man


def replay(manifest_path, out: Path | None = None, log=None) -> tuple[bool, list[str]]:
    """Re-run a manifest; returns (all identical, names of differing artifacts)."""
    man = RunManifest.read(manifest_path)
    if config_hash(man.config_text) != man.config_sha256:
        raise ValueError("manifest config text does not match its recorded hash")
    if man.status != "complete":
        raise ValueError(f"cannot replay a run with status {man.status!r}")
    tmp = None
    if out is None:
        tmp = tempfile.TemporaryDirectory(prefix="measgeom-replay-")
        out = Path(tmp.name)
    try:
        new = execute(man.command, man.config_path, man.config_text, out, seed=man.seed,
                      samples=man.samples, threads=man.threads, log=log)
        diff = sorted(k for k in set(man.artifacts) | set(new.artifacts)
                      if man.artifacts.get(k) != new.artifacts.get(k))
    finally:
        if tmp is not None:
            tmp.cleanup()
    return not diff, diff


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="measgeom",
                                 description="Monitored-circuit geometry experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", required=True, help="YAML config file")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, help="override the master seed (u64)")
        sp.add_argument("--samples", type=int, help="override the trajectory count")
        sp.add_argument("--threads", type=int, help="worker processes")
        sp.add_argument("-q", "--quiet", action="store_true", help="no progress output")
    rp = sub.add_parser("replay", help="re-run a manifest and compare artifacts byte for byte")
    rp.add_argument("manifest")
    rp.add_argument("--out", help="keep the replayed artifacts here")
    rp.add_argument("-q", "--quiet", action="store_true")
    return ap


def _fail(kind: str, exc: Exception, code: int) -> int:
    err = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        err.update(field=exc.field, line=exc.line)
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = (lambda m: None) if args.quiet else (lambda m: print(m, file=sys.stderr))
    try:
        if args.command == "replay":
            ok, diff = replay(args.manifest, Path(args.out) if args.out else None, log)
            print(json.dumps({"replay": "identical" if ok else "different", "differs": diff}))
            return 0 if ok else 1
        text = Path(args.config).read_text()
        man = execute(args.command, args.config, text, Path(args.out), args.seed, args.samples,
                      args.threads, log)
        print(json.dumps({"status": man.status, "out": args.out,
                          "artifacts": sorted(man.artifacts)}))
        return 0
    except ConfigError as exc:
        return _fail("config", exc, 2)
    except (FileNotFoundError, ValueError) as exc:
        return _fail("input", exc, 2)
    except Exception as exc:  # noqa: BLE001 - every failure becomes a structured exit
        return _fail("runtime", exc, 1)


if __name__ == "__main__":
    sys.exit(main())
