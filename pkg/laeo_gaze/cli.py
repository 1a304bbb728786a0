"""Command-line entry point.

Every command writes its outputs and a ``manifest.json`` into ``--out``.
Exit codes: 0 on success, 1 on invalid input or a missing file, 2 when a
loss or gradient became non-finite (or a gradient check failed).
"""

import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import click

from .annotate import detect_laeo_pair, ingest_frames, score_decisions, synth_multiview_frame, write_frames
from .config import (
    DEFAULT_OUT_DIR,
    DEFAULT_SEED,
    DETECT_CONFIG,
    EXPERIMENT_CONFIG,
    GRADCHECK_CONFIG,
    NOISE_CONFIG,
    output_path,
)
from .errors import InvalidInputError, LaeoError, NumericalError
from .export import write_csv, write_json, write_manifest
from .grad.checks import GRADCHECK_CASES, run_gradcheck
from .losses import LossWeights
from .scene import (
    NoiseModel,
    SceneDataset,
    SynthConfig,
    corrupt,
    default_label_ladder,
    eye_center_assumption_error,
    ingest_scenes,
    label_error_study,
    subject_label_rows,
    synth_dataset,
    write_scenes,
)
from .training import (
    AblationConfig,
    TrainConfig,
    build_training_data,
    compare_schedules,
    default_ablation_grid,
    depth_noise_study,
    experiment_config,
    labeled_eval_set,
    load_train_config,
    make_labeled_samples,
    run_ablation,
    run_training,
    run_variant_study,
    save_params,
    synth_split,
    variant_ablation_grid,
    variant_config,
)
from .training.trainer import COMPONENT_COLUMNS

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

SCENES_FILE = "scenes.jsonl"
FRAMES_FILE = "frames.jsonl"


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _float_list(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    """Parse a comma list such as ``0.1,0.3,0.5``."""
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma list of numbers, got {value!r}")


def _seed_option(f):
    return click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True,
                        help="Master seed for every random draw")(f)


def _out_option(f):
    return click.option("--out", "out_dir", type=click.Path(file_okay=False), default=DEFAULT_OUT_DIR,
                        show_default=True, help="Output directory")(f)


def _loss_options(f):
    f = click.option("--geom3d-mode", type=click.Choice(["plane", "cosine"]), default=None,
                     help="Geometric 3D loss form")(f)
    f = click.option("--pseudo-mode", type=click.Choice(["weighted", "naive", "confident"]), default=None,
                     help="Pseudo-label combination")(f)
    return f


def _weight_overrides(losses: Optional[str], pseudo_mode: Optional[str], geom3d_mode: Optional[str]) -> Dict[str, Any]:
    return {"losses": losses, "pseudo_mode": pseudo_mode, "geom3d_mode": geom3d_mode}


def _dump(config: TrainConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json")


def _load_pairs(input_path: Optional[str], n: int, seed: int):
    if input_path is not None:
        return ingest_scenes(input_path).pairs
    return synth_dataset(SynthConfig(), n, seed)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.option("--quiet", "-q", is_flag=True, help="Warnings and errors only")
def cli(verbose: bool, quiet: bool):
    """Weakly supervised 3D gaze from people looking at each other."""
    _configure_logging(verbose, quiet)


# =============================================================================
# Datasets
# =============================================================================


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=0), default=EXPERIMENT_CONFIG["n_pairs"], show_default=True,
              help="Scenes (or frames with --multiview)")
@click.option("--multiview", is_flag=True, help="Synthesize multi-view detector frames instead of LAEO pairs")
@click.option("--n-views", type=click.IntRange(min=1), default=DETECT_CONFIG["n_views"], show_default=True)
@click.option("--noise-deg", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Per-view gaze noise for --multiview")
@_seed_option
@_out_option
def synth(n: int, multiview: bool, n_views: int, noise_deg: float, seed: int, out_dir: str):
    """Synthesize a LAEO scene dataset with ground truth."""
    if multiview:
        frames = [
            synth_multiview_frame([seed, k], n_views=n_views, noise_deg=noise_deg, frame_id=f"mv-{k:05d}")
            for k in range(n)
        ]
        path = output_path(out_dir, FRAMES_FILE)
        write_frames(path, frames)
    else:
        path = output_path(out_dir, SCENES_FILE)
        write_scenes(path, synth_dataset(SynthConfig(), n, seed))
    config = {"n": n, "multiview": multiview, "n_views": n_views, "noise_deg": noise_deg,
              "synth": SynthConfig().model_dump(mode="json")}
    write_manifest(out_dir, "synth", seed, config, [path])
    logger.info("wrote %d %s to %s", n, "frames" if multiview else "scenes", path)


@cli.command("corrupt")
@click.option("--input", "input_path", type=click.Path(), required=True, help="Scene dataset (JSON lines)")
@click.option("--focal-mode", type=click.Choice(["exact", "max-image-dim"]), default="exact", show_default=True)
@click.option("--eye-sigma-px", type=click.FloatRange(min=0), default=0.0, show_default=True)
@click.option("--depth-sigma", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Relative depth noise")
@_seed_option
@_out_option
def corrupt_command(input_path: str, focal_mode: str, eye_sigma_px: float, depth_sigma: float, seed: int, out_dir: str):
    """Apply geometry approximations to a dataset; ground truth is kept."""
    noise = NoiseModel(name="cli", focal_mode=focal_mode, eye2d_sigma_px=eye_sigma_px,
                       depth_rel_sigma=depth_sigma, seed=seed)
    pairs = [corrupt(p, noise) for p in ingest_scenes(input_path).pairs]
    path = output_path(out_dir, SCENES_FILE)
    write_scenes(path, pairs)
    write_manifest(out_dir, "corrupt", seed, {"noise": noise.model_dump(mode="json")}, [path], [input_path])


@cli.command()
@click.option("--input", "input_path", type=click.Path(), required=True, help="Scene dataset (JSON lines)")
@_seed_option
@_out_option
def labels(input_path: str, seed: int, out_dir: str):
    """Derived LAEO labels next to ground truth, one row per subject."""
    rows = subject_label_rows(ingest_scenes(input_path).pairs)
    path = write_csv(output_path(out_dir, "labels.csv"), rows,
                     ["frame_id", "subject", "derived_pitch", "derived_yaw", "gt_pitch", "gt_yaw", "error_deg"])
    write_manifest(out_dir, "labels", seed, {}, [path], [input_path])


# =============================================================================
# Gradient checks
# =============================================================================


@cli.command()
@click.option("--configs", type=click.IntRange(min=1), default=GRADCHECK_CONFIG["configs_per_loss"], show_default=True,
              help="Random configurations per loss")
@click.option("--step", "steps", callback=_float_list, default=None,
              help="Comma list of finite-difference steps")
@click.option("--loss", "losses", type=click.Choice(sorted(GRADCHECK_CASES)), multiple=True,
              help="Check only these losses (repeatable)")
@click.option("--tolerance", type=float, default=GRADCHECK_CONFIG["tolerance"], show_default=True)
@_seed_option
@_out_option
def gradcheck(configs: int, steps: Optional[List[float]], losses: Sequence[str], tolerance: float,
              seed: int, out_dir: str):
    """Compare every loss gradient with central differences."""
    steps = steps or [GRADCHECK_CONFIG["step"]]
    rows = run_gradcheck(configs=configs, steps=steps, seed=seed, losses=list(losses) or None)
    path = write_csv(output_path(out_dir, "gradcheck.csv"), [r.to_dict() for r in rows],
                     ["loss", "configs", "max_rel_err", "step"])
    config = {"configs": configs, "steps": steps, "losses": [r.loss for r in rows], "tolerance": tolerance}
    write_manifest(out_dir, "gradcheck", seed, config, [path])
    failed = [r for r in rows if not r.max_rel_err < tolerance]
    if failed:
        names = ", ".join(f"{r.loss} ({r.max_rel_err:.3g} at step {r.step:g})" for r in failed)
        raise NumericalError(f"gradient check failed: {names}")


# =============================================================================
# Training
# =============================================================================


@cli.command()
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="Scene dataset; synthesized from --seed when omitted")
@click.option("--n", "n", type=click.IntRange(min=1), default=EXPERIMENT_CONFIG["n_pairs"], show_default=True,
              help="Synthetic pairs when --input is omitted")
@click.option("--config", "config_path", type=click.Path(), default=None, help="KEY=VALUE or JSON overrides")
@click.option("--losses", default=None, help="Comma list of geom3d, geom2d, pseudo, sym")
@_loss_options
@click.option("--schedule", type=click.Choice(["weak_only", "supervised_then_joint", "supervised_only"]), default=None)
@click.option("--predictor", type=click.Choice(["direct", "mlp"]), default=None)
@click.option("--iterations", type=click.IntRange(min=1), default=None)
@click.option("--learning-rate", type=float, default=None)
@_seed_option
@_out_option
def train(input_path: Optional[str], n: int, config_path: Optional[str], losses: Optional[str],
          pseudo_mode: Optional[str], geom3d_mode: Optional[str], schedule: Optional[str],
          predictor: Optional[str], iterations: Optional[int], learning_rate: Optional[float],
          seed: int, out_dir: str):
    """Train a gaze predictor and write its history, summary and parameters."""
    overrides = _weight_overrides(losses, pseudo_mode, geom3d_mode)
    overrides.update({"schedule": schedule, "predictor": predictor, "iterations": iterations,
                      "learning_rate": learning_rate, "seed": seed})
    config = load_train_config(config_path, overrides)

    pairs = _load_pairs(input_path, n, seed) if config.schedule != "supervised_only" else []
    labeled = []
    if config.schedule != "weak_only":
        if config.n_labeled == 0:
            raise InvalidInputError(f"schedule {config.schedule} needs n_labeled > 0 (set it in --config)")
        labeled = make_labeled_samples(synth_split(SynthConfig(), config.n_labeled, seed, "labeled"),
                                       seed, config.features)
    heldout = None
    if config.n_heldout > 0:
        heldout = labeled_eval_set(make_labeled_samples(synth_split(SynthConfig(), config.n_heldout, seed, "heldout"),
                                                        seed + 1, config.features))
    data = build_training_data(SceneDataset(pairs=list(pairs), labeled=labeled), seed, config.features)
    report = run_training(data, config, heldout=heldout)

    outputs = [
        write_csv(output_path(out_dir, "history.csv"), [r.to_dict() for r in report.history],
                  ["iteration", "phase", "loss", *COMPONENT_COLUMNS, "excluded"]),
        write_json(output_path(out_dir, "summary.json"), report.summary()),
    ]
    params_path = output_path(out_dir, "params.json")
    save_params(report.params, params_path)
    outputs.append(params_path)
    write_manifest(out_dir, "train", seed, _dump(config), outputs, [input_path] if input_path else [])


# =============================================================================
# Studies
# =============================================================================


def _study_base(config_path: Optional[str], seed: int, base: Optional[TrainConfig] = None) -> TrainConfig:
    return load_train_config(config_path, {"seed": seed}, base=base or experiment_config())


@cli.command()
@click.option("--losses", "loss_rows", multiple=True,
              help="One configuration per flag, e.g. --losses pseudo --losses geom3d,geom2d,pseudo")
@_loss_options
@click.option("--variants", is_flag=True, help="Run the pseudo-mode and geom3d-form grid on the network predictor")
@click.option("--seeds", type=click.IntRange(min=1), default=None,
              help=f"Seeds per row [default: {EXPERIMENT_CONFIG['ablation_seeds']}, "
                   f"{EXPERIMENT_CONFIG['variant_seeds']} with --variants]")
@click.option("--n", "n", type=click.IntRange(min=1), default=EXPERIMENT_CONFIG["n_pairs"], show_default=True)
@click.option("--input", "input_path", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@_seed_option
@_out_option
def ablate(loss_rows: Sequence[str], pseudo_mode: Optional[str], geom3d_mode: Optional[str], variants: bool,
           seeds: Optional[int], n: int, input_path: Optional[str], config_path: Optional[str], seed: int,
           out_dir: str):
    """Train several loss configurations, median final error over seeds."""
    if variants and (loss_rows or pseudo_mode or geom3d_mode):
        raise InvalidInputError("--variants sets its own losses and modes; "
                                "drop --losses, --pseudo-mode and --geom3d-mode")
    seeds = seeds or EXPERIMENT_CONFIG["variant_seeds" if variants else "ablation_seeds"]
    run_seeds = [seed + k for k in range(seeds)]
    pairs = _load_pairs(input_path, n, seed)
    if variants:
        base = _study_base(config_path, seed, base=variant_config())
        grid = variant_ablation_grid()
        rows = run_variant_study(run_seeds, base=base, scene_seed=seed, pairs=pairs)
    else:
        base = _study_base(config_path, seed)
        if loss_rows:
            options = {k: v for k, v in (("pseudo_mode", pseudo_mode), ("geom3d_mode", geom3d_mode)) if v}
            grid = [AblationConfig(tokens, LossWeights.from_tokens(tokens, **options)) for tokens in loss_rows]
        else:
            grid = default_ablation_grid(pseudo_mode=pseudo_mode, geom3d_mode=geom3d_mode)
        rows = run_ablation(grid, run_seeds, base=base, pairs=pairs)
    path = write_csv(output_path(out_dir, "ablation.csv"), [r.to_dict() for r in rows])
    config = {"base": _dump(base), "grid": [entry.name for entry in grid], "seeds": run_seeds, "n": len(pairs)}
    write_manifest(out_dir, "ablate", seed, config, [path], [input_path] if input_path else [])


@cli.command("noise-study")
@click.option("--sigma", "sigmas", callback=_float_list, default=None,
              help="Comma list of relative depth-noise levels")
@click.option("--arm", type=click.Choice(["both", "with_l2d", "without_l2d"]), default="both", show_default=True)
@click.option("--losses", default=None, help="Loss set before the 2D loss is added or removed")
@_loss_options
@click.option("--seeds", type=click.IntRange(min=1), default=EXPERIMENT_CONFIG["noise_seeds"], show_default=True)
@click.option("--n", "n", type=click.IntRange(min=1), default=EXPERIMENT_CONFIG["n_pairs"], show_default=True)
@click.option("--config", "config_path", type=click.Path(), default=None)
@_seed_option
@_out_option
def noise_study(sigmas: Optional[List[float]], arm: str, losses: Optional[str], pseudo_mode: Optional[str],
                geom3d_mode: Optional[str], seeds: int, n: int, config_path: Optional[str], seed: int, out_dir: str):
    """Final error under depth noise, with and without the 2D loss."""
    base = load_train_config(config_path, {"seed": seed, **_weight_overrides(losses, pseudo_mode, geom3d_mode)},
                             base=experiment_config())
    sigmas = sigmas if sigmas is not None else list(EXPERIMENT_CONFIG["noise_sigmas"])
    with_l2d = None if arm == "both" else arm == "with_l2d"
    run_seeds = [seed + k for k in range(seeds)]
    rows = depth_noise_study(base, sigmas=sigmas, with_l2d=with_l2d, seeds=run_seeds, n_pairs=n, scene_seed=seed)
    path = write_csv(output_path(out_dir, "noise_study.csv"), [r.to_dict() for r in rows])
    config = {"base": _dump(base), "sigmas": sigmas, "arm": arm, "seeds": run_seeds, "n": n}
    write_manifest(out_dir, "noise-study", seed, config, [path])


@cli.command("label-study")
@click.option("--n", "n", type=click.IntRange(min=1), default=NOISE_CONFIG["study_scenes"], show_default=True)
@click.option("--input", "input_path", type=click.Path(), default=None)
@click.option("--schedules", is_flag=True,
              help="Also compare supervised_only with supervised_then_joint at a 10% label budget")
@click.option("--config", "config_path", type=click.Path(), default=None)
@_seed_option
@_out_option
def label_study(n: int, input_path: Optional[str], schedules: bool, config_path: Optional[str], seed: int, out_dir: str):
    """Label error as geometry approximations are replaced by exact values."""
    pairs = ingest_scenes(input_path).pairs if input_path else None
    ladder = default_label_ladder(seed)
    rows = label_error_study(SynthConfig(), ladder, n_scenes=n, seed=seed, pairs=pairs)
    outputs = [write_csv(output_path(out_dir, "label_study.csv"), [r.to_dict() for r in rows])]
    summary: Dict[str, Any] = {
        "rungs": [r.to_dict() for r in rows],
        "eye_center_assumption_error_deg": eye_center_assumption_error(37.5, 500.0),
    }
    config: Dict[str, Any] = {"ladder": [m.model_dump(mode="json") for m in ladder], "n": n}
    if schedules:
        base = _study_base(config_path, seed, TrainConfig(predictor="mlp", learning_rate=1e-3))
        results = compare_schedules(base, scene_seed=seed, seeds=(seed,))
        summary["schedules"] = [results[k].to_dict() for k in sorted(results)]
        config["schedule_base"] = _dump(base)
    outputs.append(write_json(output_path(out_dir, "label_study.json"), summary))
    write_manifest(out_dir, "label-study", seed, config, outputs, [input_path] if input_path else [])


# =============================================================================
# Detection
# =============================================================================


@cli.command()
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="Multi-view frames (JSON lines); synthesized when omitted")
@click.option("--n", "n", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--noise-deg", type=click.FloatRange(min=0), default=0.0, show_default=True)
@click.option("--min-views", type=click.IntRange(min=1), default=DETECT_CONFIG["min_views"], show_default=True)
@click.option("--threshold-deg", type=click.FloatRange(min=0, max=180), default=DETECT_CONFIG["threshold_deg"],
              show_default=True)
@_seed_option
@_out_option
def detect(input_path: Optional[str], n: int, noise_deg: float, min_views: int, threshold_deg: float,
           seed: int, out_dir: str):
    """Label LAEO pairs from multi-view frames and score the decisions."""
    if input_path:
        frames = ingest_frames(input_path)
    else:
        frames = [synth_multiview_frame([seed, k], noise_deg=noise_deg, frame_id=f"mv-{k:05d}") for k in range(n)]
    decisions = [
        detect_laeo_pair(f.views, min_views=min_views, threshold_deg=threshold_deg, frame_id=f.frame_id)
        for f in frames
    ]
    result = score_decisions(frames, decisions, noise_deg)
    logger.info("precision %.3f recall %.3f over %d frames", result.precision, result.recall, result.frames)
    outputs = [
        write_json(output_path(out_dir, "detect.json"), result.to_dict()),
        write_csv(output_path(out_dir, "decisions.csv"), [d.to_dict() for d in decisions],
                  ["frame_id", "status", "subject_a", "subject_b", "detected_pairs", "max_passing_views"]),
    ]
    config = {"min_views": min_views, "threshold_deg": threshold_deg, "noise_deg": noise_deg,
              "n": result.frames}
    write_manifest(out_dir, "detect", seed, config, outputs, [input_path] if input_path else [])


# =============================================================================
# Entry points
# =============================================================================


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and map its outcome to an exit code."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="laeo-gaze", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1
    except NumericalError as e:
        logger.error("%s", e)
        return 2
    except (LaeoError, FileNotFoundError) as e:
        logger.error("%s", e)
        return 1
    return rv if isinstance(rv, int) else 0


def main() -> None:
    sys.exit(run())
