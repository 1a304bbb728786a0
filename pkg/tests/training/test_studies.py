import numpy as np
import pytest

from laeo_gaze.errors import InvalidInputError
from laeo_gaze.losses import LossWeights
from laeo_gaze.scene import SceneDataset, SynthConfig, synth_dataset
from laeo_gaze.training import (
    AblationConfig,
    TrainConfig,
    compare_schedules,
    default_ablation_grid,
    depth_noise_study,
    experiment_config,
    labeled_eval_set,
    make_labeled_samples,
    run_ablation,
    run_training,
    run_variant_study,
    synth_split,
    variant_ablation_grid,
    variant_config,
)


class TestGrids:

    def test_default_grid_keeps_symmetry_on(self):
        grid = default_ablation_grid()
        assert grid[-1].name == "geom3d+geom2d+pseudo"
        assert all(e.weights.symmetry and e.schedule == "weak_only" for e in grid)
        assert len(grid) == 7

    def test_default_grid_takes_modes(self):
        grid = default_ablation_grid(pseudo_mode="naive", geom3d_mode="cosine")
        assert {e.weights.pseudo_mode for e in grid} == {"naive"}
        assert {e.weights.geom3d_mode for e in grid} == {"cosine"}
        assert default_ablation_grid(pseudo_mode=None)[0].weights.pseudo_mode == "weighted"

    def test_variant_grid(self):
        rows = {e.name: e for e in variant_ablation_grid()}
        assert rows["pseudo_confident"].weights.pseudo_mode == "confident"
        assert rows["pseudo_naive"].weights.component_list() == ["pseudo"]
        assert rows["pseudo_weighted"].schedule == "supervised_then_joint"
        assert rows["geom3d_cosine"].weights.geom3d_mode == "cosine"
        assert rows["geom3d_cosine"].weights.component_list() == ["geom3d"]
        assert rows["geom3d_plane"].schedule == "weak_only"

    def test_experiment_preset(self):
        config = experiment_config(iterations=10)
        assert config.predictor == "direct"
        assert config.iterations == 10

    def test_variant_preset(self):
        config = variant_config()
        assert config.predictor == "mlp"
        assert config.features.cue_sigma_min_deg < config.features.cue_sigma_max_deg


class TestStudyInputs:

    def test_ablation_needs_configs_and_seeds(self):
        with pytest.raises(InvalidInputError):
            run_ablation([], seeds=[0])
        with pytest.raises(InvalidInputError):
            run_ablation(default_ablation_grid(), seeds=[])

    def test_supervised_rows_need_labels(self):
        row = AblationConfig("pseudo", LossWeights.from_tokens("pseudo,sym"), "supervised_then_joint")
        with pytest.raises(InvalidInputError):
            run_ablation([row], seeds=[0], base=experiment_config(iterations=2), n_pairs=4)

    def test_variant_study_needs_the_network(self):
        with pytest.raises(InvalidInputError):
            run_variant_study([0], base=experiment_config(), n_pairs=4)

    def test_negative_depth_noise(self):
        with pytest.raises(InvalidInputError):
            depth_noise_study(sigmas=[-0.1], seeds=[0], n_pairs=4)

    def test_schedule_comparison_needs_the_network(self):
        with pytest.raises(InvalidInputError):
            compare_schedules(TrainConfig(predictor="direct"), n_pairs=4)

    def test_small_ablation_rows(self):
        base = experiment_config(iterations=20)
        rows = run_ablation(default_ablation_grid()[:2], seeds=[0, 1], base=base, n_pairs=10)
        assert [r.name for r in rows] == ["pseudo", "geom2d"]
        assert rows[0].to_dict()["seeds"] == 2
        assert rows[0].to_dict()["schedule"] == "weak_only"
        assert rows[0].median_error_deg == pytest.approx(float(np.median(rows[0].seed_errors)))

    def test_small_variant_study(self):
        base = variant_config(iterations=5, supervised_iterations=3, joint_iterations=4, hidden_width=4)
        rows = run_variant_study([0], base=base, n_pairs=10)
        assert [r.name for r in rows] == [e.name for e in variant_ablation_grid()]
        assert rows[0].schedule == "supervised_then_joint"
        assert all(np.isfinite(r.median_error_deg) for r in rows)


@pytest.mark.slow
class TestExperiments:

    def test_ablation_ordering(self):
        rows = {r.name: r for r in run_ablation(default_ablation_grid(), seeds=range(5))}
        assert rows["geom3d+geom2d+pseudo"].median_error_deg < 2.0
        for name in ("pseudo", "geom2d", "geom2d+pseudo"):
            assert rows[name].median_error_deg >= 20.0
        for name in ("geom3d", "geom3d+geom2d", "geom3d+pseudo", "geom3d+geom2d+pseudo"):
            assert rows[name].median_error_deg < 5.0
        worst_geometric = max(max(rows[n].seed_errors) for n in rows if n.startswith("geom3d"))
        best_degenerate = min(min(rows[n].seed_errors) for n in rows if not n.startswith("geom3d"))
        assert worst_geometric < best_degenerate

    def test_variant_ordering(self):
        rows = {r.name: r.median_error_deg for r in run_variant_study(seeds=range(4))}
        assert rows["pseudo_weighted"] <= rows["pseudo_confident"]
        assert rows["pseudo_weighted"] <= rows["pseudo_naive"]
        assert rows["geom3d_plane"] <= rows["geom3d_cosine"]

    def test_depth_noise_grows_the_error_and_the_2d_loss_never_hurts(self):
        rows = depth_noise_study(sigmas=(0.1, 0.3, 0.5))
        by_arm = {}
        for row in rows:
            by_arm.setdefault(row.arm, []).append(row.median_error_deg)
        # depth noise slides eyes along their camera rays, so the corrupted 3D
        # target still lies on the 2D line and both arms share minimizers
        assert all(w <= wo + 0.25 for w, wo in zip(by_arm["with_l2d"], by_arm["without_l2d"]))
        for errors in by_arm.values():
            assert errors == sorted(errors)

    def test_cosine_variant_converges_to_the_labels(self):
        weights = LossWeights.from_tokens("geom3d", geom3d_mode="cosine")
        pairs = synth_dataset(SynthConfig(), 50, 42)
        report = run_training(SceneDataset(pairs=pairs), experiment_config(weights=weights))
        assert report.final_label_error_deg < 0.1

    def test_uncertainty_tracks_heldout_error(self):
        synth = SynthConfig()
        pairs = synth_dataset(synth, 200, 42)
        config = TrainConfig(predictor="mlp", learning_rate=1e-3)
        heldout = labeled_eval_set(make_labeled_samples(synth_split(synth, 100, 42, "heldout"), 1, config.features))
        report = run_training(SceneDataset(pairs=pairs), config, heldout=heldout)
        assert report.heldout_spearman_defined
        assert report.heldout_spearman > 0

    def test_joint_training_helps_with_few_labels(self):
        results = compare_schedules(seeds=(0, 1))
        assert (results["supervised_then_joint"].median_error_deg
                <= results["supervised_only"].median_error_deg)
