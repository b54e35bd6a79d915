"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O failure,
4 numerical failure (non-invertible calibration).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .capture import GeNotch, Scene, blackbody_sweep, capture_frame, region_scene, scene_from_dict
from .errors import CalibrationError, DimensionError, DomainError
from .fileio import (
    load_frame,
    save_frame,
    write_mask_pgm,
    write_matrix_csv,
    write_ppm,
    write_sidecar,
)
from .pipeline import (
    BandSet,
    CalibrationCurve,
    counts_to_temperature,
    fit_calibration,
    flatfield_correct,
    fuse_false_color,
    ntvi,
    sharpness_score,
    upscale,
)
from .plasmonics import (
    FilterSpec,
    default_filters,
    get_material,
    load_materials,
    pitch_for_wavelength,
    spp_wavelength_approx,
    sweep_center_vs_pitch,
    transmission_curve,
)
from .sensor import DetectorModel, camera_from_dict, detector_responsivity, make_dark_frame
from .spectral import SpectralGrid, default_grid, read_curve_csv, write_curve_csv

CONFIG_DIR_ENV = "LWIRMS_CONFIG_DIR"
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class ConfigError(Exception):
    pass


# -- configuration -------------------------------------------------------------

@dataclass
class RunConfig:
    detector: DetectorModel
    scenes: list[tuple[str, Scene]] = field(default_factory=list)
    filters: list[FilterSpec] = field(default_factory=default_filters)
    output_dir: Path = Path(".")
    seed: int = 0
    grid: SpectralGrid = field(default_factory=default_grid)
    notch: Optional[GeNotch] = None


def _read_json(path: Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def _grid_from(cfg) -> SpectralGrid:
    if not cfg:
        return default_grid()
    return SpectralGrid.uniform(float(cfg.get("start", 6.0)), float(cfg.get("stop", 16.0)),
                                float(cfg.get("step", 0.01)))


def filter_from_dict(d: dict, catalog: dict, base_dir: Path, index: int) -> FilterSpec:
    material = get_material(d.get("dielectric", "ge"), catalog)
    center = d.get("center_um")
    pitch = d.get("pitch_um")
    if pitch is None:
        if center is None:
            raise ConfigError(f"filter {index}: needs pitch_um or center_um")
        pitch = pitch_for_wavelength(float(center), material)
    curve = None
    if d.get("curve_csv"):
        curve = read_curve_csv(base_dir / d["curve_csv"])
    return FilterSpec(
        pitch_um=float(pitch),
        dielectric=material,
        aspect_ratio=float(d.get("aspect_ratio", 0.6)),
        order=tuple(d.get("order", (1, 0))),
        center_um_override=None if center is None else float(center),
        fwhm_um=float(d.get("fwhm_um", 1.35)),
        peak_transmission=float(d.get("peak_transmission", 0.60)),
        curve=curve,
        name=str(d.get("name", f"band{index}")),
    )


def _default_camera_path() -> Optional[Path]:
    root = os.environ.get(CONFIG_DIR_ENV)
    if root and (Path(root) / "camera.json").exists():
        return Path(root) / "camera.json"
    return None


def load_camera(camera, base_dir: Path, grid: SpectralGrid, seed=None) -> DetectorModel:
    if camera is None:
        path = _default_camera_path()
        cfg, base_dir = ({}, base_dir) if path is None else (_read_json(path), path.parent)
    elif isinstance(camera, dict):
        cfg = dict(camera)
    else:
        path = base_dir / camera
        cfg, base_dir = _read_json(path), path.parent
    if seed is not None:
        cfg["seed"] = seed
    return camera_from_dict(cfg, base_dir, grid)


def load_run_config(path=None) -> RunConfig:
    """Parse a run configuration; ``None`` gives the built-in defaults."""
    if path is None:
        cfg, base = {}, Path(".")
    else:
        path = Path(path)
        cfg, base = _read_json(path), path.parent
    try:
        grid = _grid_from(cfg.get("grid"))
        catalog = load_materials(base / cfg["materials"] if cfg.get("materials") else None)
        seed = cfg.get("seed")
        detector = load_camera(cfg.get("camera"), base, grid, seed)
        if "filters" in cfg:
            filters = [filter_from_dict(d, catalog, base, k)
                       for k, d in enumerate(cfg["filters"], start=1)]
        else:
            filters = default_filters()
        if not 1 <= len(filters) <= 3:
            raise ConfigError(f"expected 1-3 filters, got {len(filters)}")
        scenes = []
        for k, entry in enumerate(cfg.get("scenes", [])):
            if isinstance(entry, str):
                spath = base / entry
                scene_cfg, sbase = _read_json(spath), spath.parent
                name = scene_cfg.get("name", spath.stem)
            else:
                scene_cfg, sbase = entry, base
                name = entry.get("name", f"scene{k}")
            scenes.append((name, scene_from_dict(scene_cfg, sbase, detector.width,
                                                 detector.height)))
        notch = GeNotch(**cfg["ge_notch"]) if cfg.get("ge_notch") else None
        out = base / cfg.get("output_dir", ".")
    except (DomainError, DimensionError, KeyError, TypeError, ValueError, OSError) as exc:
        if isinstance(exc, CalibrationError):
            raise
        raise ConfigError(f"invalid run config: {exc}") from None
    return RunConfig(detector, scenes, filters, out, detector.seed, grid, notch)


def parse_temps(text: str) -> list[float]:
    """``lo:hi:step`` (inclusive of ``hi`` when on the step) or a comma list, in C."""
    try:
        if ":" in text:
            lo, hi, step = (float(v) for v in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(np.floor((hi - lo) / step + 1e-9)) + 1
            return [round(lo + k * step, 10) for k in range(n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad temperature range {text!r}") from None


def _inputs(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _band_labels(filters) -> list[str]:
    return [f.name or f"band{k}" for k, f in enumerate(filters, start=1)]


# -- subcommands -----------------------------------------------------------------

def cmd_design(args) -> int:
    catalog = load_materials(args.materials)
    material = get_material(args.dielectric, catalog)
    pitch = args.pitch if args.pitch is not None else pitch_for_wavelength(args.target, material)
    spec = FilterSpec(pitch, material, aspect_ratio=args.aspect, order=tuple(args.order),
                      fwhm_um=args.fwhm, peak_transmission=args.peak)
    center = spp_wavelength_approx(pitch, material, spec.order)
    print(f"dielectric: {material.name} (n_D = {material.n_d:g})")
    print(f"order: {spec.order[0]},{spec.order[1]}")
    print(f"pitch_um: {pitch:.4f}")
    print(f"center_um: {center:.4f}")
    print(f"fwhm_um: {spec.fwhm_um:.4f}")
    print(f"peak_transmission: {spec.peak_transmission:.4f}")
    if args.curve_out or args.plot:
        curve = transmission_curve(spec, default_grid())
        if args.curve_out:
            write_curve_csv(curve, args.curve_out)
            write_sidecar(args.curve_out, "design", _inputs(args))
        if args.plot:
            from .plotting import plot_transmission
            plot_transmission([(f"P = {pitch:.3f} µm", curve)], args.plot)
    return 0


def cmd_filter_curve(args) -> int:
    material = get_material(args.dielectric, load_materials(args.materials))
    if args.pitch is not None:
        spec = FilterSpec(args.pitch, material, fwhm_um=args.fwhm, peak_transmission=args.peak)
    else:
        spec = FilterSpec(pitch_for_wavelength(args.center, material), material,
                          center_um_override=args.center, fwhm_um=args.fwhm,
                          peak_transmission=args.peak)
    grid = SpectralGrid.uniform(*args.grid)
    curve = transmission_curve(spec, grid)
    write_curve_csv(curve, args.out)
    write_sidecar(args.out, "filter-curve", _inputs(args), center_um=spec.center_um)
    if args.plot:
        from .plotting import plot_transmission
        plot_transmission([(f"{spec.center_um:.2f} µm", curve)], args.plot)
    print(f"wrote {args.out} (center {spec.center_um:.4f} um)")
    return 0


def cmd_simulate(args) -> int:
    run = load_run_config(args.config)
    out = Path(args.out) if args.out else run.output_dir
    if not run.scenes:
        raise ConfigError("run config lists no scenes")
    out.mkdir(parents=True, exist_ok=True)
    det = run.detector
    targets = [("mono", None)] + list(zip(_band_labels(run.filters), run.filters))
    index = 0
    inputs = _inputs(args)
    for scene_name, scene in run.scenes:
        for label, filt in targets:
            frame = capture_frame(scene, filt, det, index, run.grid, run.notch)
            dark = make_dark_frame(det, index)
            ext = ".csv" if args.csv else ".pgm"
            stem = f"{scene_name}_{label}"
            save_frame(out / f"{stem}{ext}", frame, "simulate", inputs, det.seed,
                       frame_index=index, scene=scene_name, band=label)
            save_frame(out / f"{stem}_dark{ext}", dark, "simulate", inputs, det.seed,
                       frame_index=index, scene=scene_name, band=label, dark=True)
            print(f"{stem}: mean {frame.mean():.2f} counts")
            index += 1
    return 0


def cmd_calibrate(args) -> int:
    run = load_run_config(args.config)
    labels = _band_labels(run.filters)
    bands = {"mono": None, **dict(zip(labels, run.filters))}
    chosen = list(bands) if args.band == "all" else [args.band]
    for b in chosen:
        if b not in bands:
            raise ConfigError(f"unknown band {b!r}; known: {', '.join(bands)}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    inputs = _inputs(args)
    samples, calibs = {}, {}
    for b in chosen:
        samples[b] = blackbody_sweep(args.temps, bands[b], run.detector, run.grid, run.notch)
        calibs[b] = fit_calibration(samples[b], args.degree, band_id=b)
        path = out / f"calib_{b}.json"
        calibs[b].save(path)
        write_sidecar(path, "calibrate", inputs, run.seed)
        print(f"{b}: degree {args.degree}, r_squared {calibs[b].r_squared:.5f} -> {path}")
    table = out / "sweep.csv"
    with open(table, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["temperature_c"] + chosen)
        for k, t in enumerate(args.temps):
            writer.writerow([t] + [repr(samples[b][k][1]) for b in chosen])
    write_sidecar(table, "calibrate", inputs, run.seed)
    if args.plot:
        from .plotting import plot_calibration
        plot_calibration(samples, calibs, args.plot)
    return 0


def cmd_correct(args) -> int:
    frame = flatfield_correct(load_frame(args.target), load_frame(args.dark))
    save_frame(args.out, frame, "correct", _inputs(args))
    print(f"wrote {args.out}")
    return 0


def cmd_temperature(args) -> int:
    calib = CalibrationCurve.load(args.calib)
    temps, sat = counts_to_temperature(load_frame(args.frame), calib)
    write_matrix_csv(args.out, temps)
    write_sidecar(args.out, "temperature", _inputs(args), saturated=int(sat.sum()))
    if args.mask:
        write_mask_pgm(args.mask, sat)
        write_sidecar(args.mask, "temperature", _inputs(args))
    if args.plot:
        from .plotting import plot_frame
        plot_frame(temps, args.plot, label="°C")
    print(f"mean {temps.mean():.2f} C, {int(sat.sum())} saturated pixels")
    return 0


def cmd_ntvi(args) -> int:
    result = ntvi(load_frame(args.a), load_frame(args.b))
    save_frame(args.out, result, "ntvi", _inputs(args))
    if args.plot:
        from .plotting import plot_frame
        plot_frame(result.data, args.plot, cmap="RdBu_r", label="NTVI", vmin=-1, vmax=1)
    print(f"NTVI range [{result.data.min():.4f}, {result.data.max():.4f}]")
    return 0


def cmd_fuse(args) -> int:
    rgb = fuse_false_color(BandSet(tuple(load_frame(p) for p in args.bands)))
    write_ppm(args.out, rgb)
    write_sidecar(args.out, "fuse", _inputs(args))
    if args.plot:
        from .plotting import plot_rgb
        plot_rgb(rgb, args.plot)
    print(f"wrote {args.out}")
    return 0


def cmd_upscale(args) -> int:
    frame = load_frame(args.frame)
    result = upscale(frame, args.factor)
    save_frame(args.out, result, "upscale", _inputs(args))
    print(f"{frame.width}x{frame.height} -> {result.width}x{result.height}")
    return 0


def cmd_metrics(args) -> int:
    rows = []
    for p in args.frames:
        f = load_frame(p)
        rows.append([str(p), f.width, f.height, f"{sharpness_score(f):.6f}"])
    header = ["frame", "width", "height", "sharpness"]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        write_sidecar(args.out, "metrics", _inputs(args))
    return 0


def cmd_info(args) -> int:
    run = load_run_config(args.config)
    info = {
        "version": __version__,
        "config_dir_env": CONFIG_DIR_ENV,
        "camera": run.detector.to_config(),
        "grid_um": [float(run.grid.wavelengths[0]), float(run.grid.wavelengths[-1]),
                    len(run.grid)],
        "materials": {m.name: m.n_d for m in load_materials().values()},
        "filters": [
            {"name": f.name, "pitch_um": f.pitch_um, "dielectric": f.dielectric.name,
             "center_um": f.center_um, "fwhm_um": f.fwhm_um,
             "peak_transmission": f.peak_transmission}
            for f in run.filters
        ],
    }
    print(json.dumps(info, indent=2))
    return 0


def cmd_report(args) -> int:
    """Run the desk-scale chain and write CSV tables plus PNG figures."""
    from . import plotting

    run = load_run_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    det, grid = run.detector, run.grid
    labels = _band_labels(run.filters)
    inputs = _inputs(args)

    pitches = np.round(np.arange(2.0, 4.0001, 0.25), 4)
    sweeps = {m.name: sweep_center_vs_pitch(pitches, m) for m in load_materials().values()}
    with open(out / "pitch_sweep.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pitch_um"] + [f"center_um_{m}" for m in sweeps])
        for k, p in enumerate(pitches):
            w.writerow([p] + [f"{sweeps[m][k][1]:.6f}" for m in sweeps])
    plotting.plot_pitch_sweep(sweeps, out / "pitch_sweep.png")

    curves = [(lab, transmission_curve(f, grid)) for lab, f in zip(labels, run.filters)]
    with open(out / "filters.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["wavelength_um"] + labels)
        for k, wl in enumerate(grid.wavelengths):
            w.writerow([f"{wl:.4f}"] + [f"{c.values[k]:.6f}" for _, c in curves])
    plotting.plot_transmission(curves, out / "filters.png",
                               responsivity=detector_responsivity(det, grid))

    bands = {"mono": None, **dict(zip(labels, run.filters))}
    samples = {b: blackbody_sweep(args.temps, f, det, grid, run.notch)
               for b, f in bands.items()}
    calibs = {b: fit_calibration(s, args.degree, band_id=b) for b, s in samples.items()}
    with open(out / "calibration.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["band", "degree", "r_squared"] + [f"c{k}" for k in range(args.degree + 1)])
        for b, c in calibs.items():
            w.writerow([b, c.degree, f"{c.r_squared:.6f}"] + [repr(v) for v in c.coeffs])
    plotting.plot_calibration(samples, calibs, out / "calibration.png")

    if run.scenes:
        scene_name, scene = run.scenes[0]
    else:
        scene_name, scene = "regions", region_scene(det.width, det.height, args.regions)
    frames = []
    for k, f in enumerate(run.filters):
        frames.append(flatfield_correct(capture_frame(scene, f, det, k, grid, run.notch),
                                        make_dark_frame(det, k)))
    mono = flatfield_correct(capture_frame(scene, None, det, len(frames), grid, run.notch),
                             make_dark_frame(det, len(frames)))
    plotting.plot_frame(mono.data, out / "mono.png", title=f"{scene_name}: mono",
                        label="counts")
    if len(frames) >= 2:
        index = ntvi(frames[0], frames[-1])
        write_matrix_csv(out / "ntvi.csv", index.data)
        plotting.plot_frame(index.data, out / "ntvi.png", cmap="RdBu_r", label="NTVI",
                            title=f"NTVI({labels[0]}, {labels[-1]})")
    if len(frames) == 3:
        rgb = fuse_false_color(BandSet(tuple(frames)))
        write_ppm(out / "fused.ppm", rgb)
        plotting.plot_rgb(rgb, out / "fused.png", title="fused bands")
    big = upscale(frames[len(frames) // 2], args.factor)
    plotting.plot_frame(big.data, out / "upscaled.png", label="counts",
                        title=f"{big.width}x{big.height}")
    with open(out / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "width", "height", "sharpness"])
        for lab, fr in [("mono", mono)] + list(zip(labels, frames)) + [("upscaled", big)]:
            w.writerow([lab, fr.width, fr.height, f"{sharpness_score(fr):.6f}"])
    write_sidecar(out / "metrics.csv", "report", inputs, run.seed)
    for b, c in calibs.items():
        print(f"{b}: r_squared {c.r_squared:.5f}")
    print(f"report written to {out}")
    return 0


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lwirms", description="LWIR plasmonic multispectral camera toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="hole-array pitch <-> resonance wavelength")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pitch", type=float, help="pitch in um")
    g.add_argument("--target", type=float, help="target resonance wavelength in um")
    p.add_argument("--dielectric", default="ge")
    p.add_argument("--materials", help="JSON material catalog override")
    p.add_argument("--order", type=int, nargs=2, default=[1, 0], metavar=("I", "J"))
    p.add_argument("--aspect", type=float, default=0.6)
    p.add_argument("--fwhm", type=float, default=1.35)
    p.add_argument("--peak", type=float, default=0.60)
    p.add_argument("--curve-out", help="write the transmission curve CSV here")
    p.add_argument("--plot", help="write a transmission plot (PNG) here")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("filter-curve", help="write a filter transmission curve CSV")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pitch", type=float)
    g.add_argument("--center", type=float, help="explicit center wavelength in um")
    p.add_argument("--dielectric", default="ge")
    p.add_argument("--materials")
    p.add_argument("--fwhm", type=float, default=1.35)
    p.add_argument("--peak", type=float, default=0.60)
    p.add_argument("--grid", type=float, nargs=3, default=[6.0, 16.0, 0.01],
                   metavar=("START", "STOP", "STEP"))
    p.add_argument("--out", required=True)
    p.add_argument("--plot")
    p.set_defaults(func=cmd_filter_curve)

    p = sub.add_parser("simulate", help="render monochrome, band and dark frames")
    p.add_argument("--config", required=True, help="run config JSON")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--csv", action="store_true", help="write float CSV instead of PGM")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="simulated blackbody sweep and calibration fit")
    p.add_argument("--config", help="run config JSON (defaults if omitted)")
    p.add_argument("--temps", type=parse_temps, default=parse_temps("50:200:25"),
                   help="lo:hi:step or comma list, in C")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--band", default="all", help="mono, a filter name, or all")
    p.add_argument("--out", default=".")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("correct", help="dark-frame (flatfield) correction")
    p.add_argument("--target", required=True)
    p.add_argument("--dark", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("temperature", help="counts to temperature via a calibration")
    p.add_argument("--frame", required=True)
    p.add_argument("--calib", required=True)
    p.add_argument("--out", required=True, help="temperature CSV (C)")
    p.add_argument("--mask", help="saturation mask PGM")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_temperature)

    p = sub.add_parser("ntvi", help="normalized temperature variation index")
    p.add_argument("--a", required=True, help="band x")
    p.add_argument("--b", required=True, help="band y")
    p.add_argument("--out", default="ntvi.csv")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_ntvi)

    p = sub.add_parser("fuse", help="three-band false colour image")
    p.add_argument("--bands", nargs=3, required=True)
    p.add_argument("--out", default="fused.ppm")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("upscale", help="bicubic upscaling")
    p.add_argument("--frame", required=True)
    p.add_argument("--factor", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_upscale)

    p = sub.add_parser("metrics", help="sharpness score per frame")
    p.add_argument("--frames", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("info", help="print the effective configuration")
    p.add_argument("--config")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("report", help="full desk-scale run with figures")
    p.add_argument("--config")
    p.add_argument("--out", default="report")
    p.add_argument("--temps", type=parse_temps, default=parse_temps("50:200:25"))
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--regions", type=lambda s: [float(v) for v in s.split(",")],
                   default=[30.0, 100.0, 200.0], help="strip temperatures in C")
    p.add_argument("--factor", type=int, default=4)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
