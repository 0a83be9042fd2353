"""Named batch experiments: configuration, execution and validation.

Each experiment is described by a JSON config shipped with the package
(``gatectx/configs/<name>.json``).  Physical quantities carry unit suffixes
("40 ns", "1.67e-05 1/ns") and are converted to the internal units
(nanoseconds and inverse nanoseconds) during parsing; everything else is
plain JSON.  Running an experiment produces ``<output>.csv`` plus
``<output>.manifest.json`` holding the fully resolved configuration, its
hash, the seed and the package version, which together re-derive every CSV
row.  Outputs are byte-identical for a fixed config and seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .context_tests import (
    cycle_family,
    cycle_test,
    id_test,
    pd_family,
    pd_test,
    toy_model,
    toy_probability,
    toy_sequence,
)
from .errors import ConfigError, NumericalError
from .lindblad import ZZModelParams, build_gate, zz_context
from .liouville import pauli_basis
from .mc_frames import frame_search, sic_frame
from .sampling import substream
from .stats import (
    _wls_chi2_batch,
    chi2_survival,
    f_survival,
    family_true_matrices,
    id_true_matrices,
    logdet_ensemble,
    moment_ensemble,
    power_sweep,
)
from .tomography import (
    ProbMatrix,
    SpamConfig,
    ideal_log_det,
    ideal_prob_matrix,
    logdet_variance,
    mixed_sic_variance,
    probability_matrix,
    sic_set,
    sic_tensor_variance,
    sic_variance_closed_form,
    standard_set,
    tensor_set,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ValidationReport",
    "load_config",
    "parse_time",
    "parse_rate",
    "run",
    "validate",
]

_TIME_UNITS = {"ns": 1.0, "us": 1e3, "ms": 1e6, "s": 1e9}
_RATE_UNITS = {"1/ns": 1.0, "1/us": 1e-3, "1/ms": 1e-6, "1/s": 1e-9}

EXPERIMENTS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "toy-model")
_ALIASES = {"table1": "fig5", "table2-check": "fig9"}


def _parse_quantity(text, units: dict[str, float], kind: str) -> float:
    if isinstance(text, (int, float)):
        raise ConfigError(f"{kind} values need a unit suffix, e.g. '40 ns'; got {text!r}")
    parts = str(text).split()
    if len(parts) != 2 or parts[1] not in units:
        raise ConfigError(f"cannot parse {kind} {text!r}; expected '<value> <{'|'.join(units)}>'")
    try:
        value = float(parts[0])
    except ValueError as exc:
        raise ConfigError(f"cannot parse {kind} value in {text!r}") from exc
    return value * units[parts[1]]


def parse_time(text) -> float:
    """Duration with unit suffix, converted to nanoseconds."""
    return _parse_quantity(text, _TIME_UNITS, "time")


def parse_rate(text) -> float:
    """Rate with unit suffix, converted to 1/nanoseconds."""
    return _parse_quantity(text, _RATE_UNITS, "rate")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment configuration (raw dict plus parsed model)."""

    experiment: str
    raw: dict = field(repr=False)

    @property
    def sampling(self) -> dict:
        return self.raw.get("sampling", {})

    @property
    def test(self) -> dict:
        return self.raw.get("test", {})

    @property
    def output(self) -> str:
        return self.raw.get("output", self.experiment)

    @property
    def seed(self) -> int:
        return int(self.sampling.get("seed", 0))

    def model_params(self) -> ZZModelParams:
        m = self.raw.get("model")
        if m is None:
            raise ConfigError(f"experiment {self.experiment!r} has no model section")
        try:
            return ZZModelParams.from_polarization(
                gamma1=parse_rate(m["gamma1"]),
                gammaphi=parse_rate(m["gammaphi"]),
                nz=float(m["nz"]),
                t_g=parse_time(m["t_g"]),
                phi=float(m.get("phi", 0.0)),
                eta=float(m.get("eta", 1.0)),
                gamma1_b=parse_rate(m["gamma1_b"]) if "gamma1_b" in m else None,
                gammaphi_b=parse_rate(m["gammaphi_b"]) if "gammaphi_b" in m else None,
                nz_b=float(m["nz_b"]) if "nz_b" in m else None,
            )
        except KeyError as exc:
            raise ConfigError(f"model section is missing {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def lengths(self) -> np.ndarray:
        spec = self.test.get("lengths", {"start": 0, "stop": 500, "step": 10})
        out = np.arange(int(spec["start"]), int(spec["stop"]) + 1, int(spec["step"]))
        if len(out) < 3:
            raise ConfigError("need at least three sequence lengths")
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def _set_override(raw: dict, dotted: str, value: str) -> None:
    keys = dotted.split(".")
    node = raw
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {dotted!r} crosses a non-section value")
    try:
        node[keys[-1]] = json.loads(value)
    except json.JSONDecodeError:
        node[keys[-1]] = value


def load_config(name_or_path, overrides: list[str] = ()) -> ExperimentConfig:
    """Load a built-in experiment config by name, or any config by path.

    ``overrides`` are ``dotted.key=value`` strings; values parse as JSON
    when possible and as plain strings otherwise.
    """
    name = str(name_or_path)
    name = _ALIASES.get(name, name)
    if name in EXPERIMENTS:
        text = resources.files("gatectx.configs").joinpath(f"{name}.json").read_text()
    else:
        path = Path(name)
        if not path.exists():
            raise ConfigError(f"unknown experiment or missing config file: {name_or_path!r}")
        text = path.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "experiment" not in raw:
        raise ConfigError("config must be a JSON object with an 'experiment' field")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        dotted, value = item.split("=", 1)
        _set_override(raw, dotted, value)
    experiment = _ALIASES.get(raw["experiment"], raw["experiment"])
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {raw['experiment']!r}; see 'gatectx list'")
    cfg = ExperimentConfig(experiment, raw)
    _preflight(cfg)
    return cfg


def _preflight(cfg: ExperimentConfig) -> None:
    """Parse every referenced parameter up front so bad configs fail early."""
    if "model" in cfg.raw and cfg.experiment != "toy-model":
        cfg.model_params()
    if cfg.experiment == "toy-model":
        m = cfg.raw.get("model", {})
        for key in ("phi", "nzb", "alpha_pi", "alpha_pi2"):
            if key not in m:
                raise ConfigError(f"toy model config is missing model.{key}")
        if not abs(float(m["nzb"])) < 1.0:
            raise ConfigError("toy model needs |nzb| < 1")
    for key in ("n_s", "r", "b"):
        if key in cfg.sampling and int(cfg.sampling[key]) < 1:
            raise ConfigError(f"sampling.{key} must be positive")


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------


def _frame_by_name(name: str):
    if name == "standard":
        return standard_set(2)
    if name == "sic":
        return sic_set(2)
    if name == "standard x standard":
        return standard_set(2, 2)
    if name == "sic x sic":
        return tensor_set(sic_set(2), sic_set(2))
    raise ConfigError(f"unknown frame {name!r}")


# ---------------------------------------------------------------------------
# experiment implementations (each returns header + rows)
# ---------------------------------------------------------------------------


def _run_fig2(cfg: ExperimentConfig):
    params = cfg.model_params()
    n_s, r_hist = int(cfg.sampling["n_s"]), int(cfg.sampling.get("r", 2000))
    seed = cfg.seed
    gates, spam, frame = zz_context(params)
    rows = []

    pd_seqs, pd_ks = pd_family(int(cfg.test.get("pd_n", 250)))
    pd_obs = pd_test(pd_seqs, gates, spam, frame, n_s=n_s, seed=seed, xs=pd_ks)
    cyc_seqs, cyc_ks = cycle_family(int(cfg.test.get("cycle_n", 500)))
    cyc_obs = cycle_test(cyc_seqs, gates, spam, r=2, n_s=n_s, seed=seed + 1, xs=cyc_ks)
    id_obs = id_test("I", cfg.lengths(), gates, spam, frame, n_s=n_s, seed=seed + 2)
    for label, obs in (("pd_curve", pd_obs), ("cycle_curve", cyc_obs), ("id_curve", id_obs)):
        for x, y, v in zip(obs.xs, obs.ys, obs.variances):
            rows.append([label, repr(float(x)), repr(float(y)), repr(float(np.sqrt(v)))])

    # chi-squared samples under the context-independent model
    params0 = replace(params, phi=0.0)
    gates0, spam0, _ = zz_context(params0)
    offset = -ideal_log_det(frame)
    specs = {
        "pd_chi2": (family_true_matrices(pd_seqs, gates0, spam0), pd_ks.astype(float), 1, "logdet", 10),
        "cycle_chi2": (family_true_matrices(cyc_seqs, gates0, spam0), cyc_ks.astype(float), 1, "moment", 11),
        "id_chi2": (id_true_matrices("I", cfg.lengths(), gates0, spam0), cfg.lengths().astype(float), 2, "logdet", 12),
    }
    p0 = probability_matrix(None, spam0)
    for label, (true_ps, xs, q, kind, seed_shift) in specs.items():
        if kind == "logdet":
            ys, variances = logdet_ensemble(true_ps, offset, n_s, r_hist, seed + seed_shift)
        else:
            ys, variances = moment_ensemble(true_ps, p0, 2, n_s, r_hist, seed + seed_shift)
        chi2, _, _ = _wls_chi2_batch(xs, ys, variances, q)
        for i, c in enumerate(chi2):
            rows.append([label, str(i), repr(float(c)), ""])
    return ["series", "x", "y", "sigma"], rows


def _run_power(cfg: ExperimentConfig, kind: str):
    params = cfg.model_params()
    result = power_sweep(
        kind,
        params,
        cfg.test.get("phi_grid", [0.0, 2e-4, 4e-4]),
        cfg.sampling.get("n_s_grid", [10000, 50000]),
        int(cfg.sampling.get("r", 500)),
        p_cr=float(cfg.test.get("p_cr", 0.01)),
        seed=cfg.seed,
        lengths=cfg.lengths(),
        family_n=int(cfg.test["family_n"]) if "family_n" in cfg.test else None,
        frame=_frame_by_name(cfg.raw.get("frame", "standard")),
        spam_errors=bool(cfg.raw.get("spam_errors", True)),
    )
    rows = []
    for i, phi in enumerate(result.phis):
        for j, n_s in enumerate(result.n_s_values):
            rows.append([repr(phi), n_s, repr(result.chi2_ratio[i, j]), repr(result.f_ratio[i, j])])
    return ["phi", "n_s", "chi2_rejection_ratio", "f_rejection_ratio"], rows


def _gate_ensemble_rows(series, true_ps, offset, xs, n_s, r, seed, d):
    ys, variances = logdet_ensemble(true_ps, offset, n_s, r, seed)
    _, beta, _ = _wls_chi2_batch(xs, ys, variances, 2)
    u_hat = np.exp(2.0 * beta[:, 1] / (d * d - 1.0))
    return [
        [series, i, repr(float(beta[i, 0])), repr(float(beta[i, 1])), repr(float(u_hat[i]))]
        for i in range(r)
    ]


def _run_fig5(cfg: ExperimentConfig):
    params = cfg.model_params()
    n_s, r, seed = int(cfg.sampling["n_s"]), int(cfg.sampling.get("r", 2000)), cfg.seed
    gates, spam, frame = zz_context(params)
    offset = -ideal_log_det(frame)
    lengths = cfg.lengths()
    gate_map = cfg.test.get(
        "gates",
        {"I": ["I"], "X90": ["x90"], "X180": ["x180"], "Z180": ["y180", "x180"], "Z90": ["x-90", "y90", "x90"]},
    )
    rows = []
    for g_index, (name, labels) in enumerate(gate_map.items()):
        true_ps = id_true_matrices(tuple(labels), lengths, gates, spam)
        rows += _gate_ensemble_rows(name, true_ps, offset, lengths.astype(float), n_s, r, seed + g_index, 2)
    return ["gate", "rep", "beta0", "beta1", "u_hat"], rows


def _run_fig6(cfg: ExperimentConfig):
    params = cfg.model_params()
    rows = []
    for frame_name in cfg.test.get("frames", ["standard", "sic"]):
        for kind in cfg.test.get("kinds", ["pd", "id"]):
            result = power_sweep(
                kind,
                params,
                cfg.test.get("phi_grid", [0.0, 1e-4, 2e-4]),
                cfg.sampling.get("n_s_grid", [10000, 50000]),
                int(cfg.sampling.get("r", 500)),
                p_cr=float(cfg.test.get("p_cr", 0.01)),
                seed=cfg.seed,
                lengths=cfg.lengths(),
                family_n=int(cfg.test.get("pd_n", 250)) if kind == "pd" else None,
                frame=_frame_by_name(frame_name),
                spam_errors=False,
            )
            for i, phi in enumerate(result.phis):
                for j, n_s in enumerate(result.n_s_values):
                    rows.append(
                        [kind, frame_name, repr(phi), n_s,
                         repr(result.chi2_ratio[i, j]), repr(result.f_ratio[i, j])]
                    )
    return ["test", "frame", "phi", "n_s", "chi2_rejection_ratio", "f_rejection_ratio"], rows


def _run_fig7(cfg: ExperimentConfig):
    n_s, r, seed = int(cfg.sampling["n_s"]), int(cfg.sampling.get("r", 100000)), cfg.seed
    rows = []
    for dim in cfg.test.get("dims", [2, 3]):
        p_ideal = ideal_prob_matrix(sic_set(int(dim)))
        offset = -p_ideal.log_abs_det()
        stack = p_ideal.entries
        rng = substream(seed, dim)
        for i in range(r):
            hat = rng.binomial(n_s, stack) / n_s
            sign, logdet = np.linalg.slogdet(hat)
            rows.append([dim, i, repr(float(offset + logdet))])
    return ["dim", "rep", "logdet_raw"], rows


def _run_fig8(cfg: ExperimentConfig):
    search = cfg.raw.get("search", {})
    trials = int(search.get("full_scale_trials", 50_000_000)) if search.get("full_scale") else int(
        search.get("trials", 1_000_000)
    )
    result = frame_search(
        trials,
        k=int(search.get("keep", 100)),
        det_floor=float(search.get("det_floor", 1e-5)),
        seed=cfg.seed,
    )
    rows = []
    for metric, records in result.records.items():
        for rank, rec in enumerate(records, start=1):
            rows.append(
                [metric, rank, repr(rec.value), repr(rec.distance_to_sic)]
                + [repr(x) for x in rec.frame.bloch.ravel()]
            )
    header = ["metric", "rank", "value", "distance_to_sic"] + [
        f"n{i}{ax}" for i in range(1, 5) for ax in "xyz"
    ]
    return header, rows


def _table2_rows():
    basis_cases = [
        ("2 standard", ideal_prob_matrix(standard_set(2)), None),
        ("3 standard", ideal_prob_matrix(standard_set(3)), None),
        ("2x2 standard", ideal_prob_matrix(standard_set(2, 2)), None),
        ("2x2 global standard", ideal_prob_matrix(standard_set(4)), None),
        ("2 sic", ideal_prob_matrix(sic_set(2)), sic_variance_closed_form(2, 1)),
        ("3 sic", ideal_prob_matrix(sic_set(3)), sic_variance_closed_form(3, 1)),
        ("2x2 sic", ideal_prob_matrix(tensor_set(sic_set(2), sic_set(2))), sic_tensor_variance(2, 2, 1)),
        ("2x3 sic", ideal_prob_matrix(tensor_set(sic_set(2), sic_set(3))), mixed_sic_variance(2, 3, 1)),
    ]
    rows = []
    for label, p, closed in basis_cases:
        direct = logdet_variance(p, n_s=1)
        rows.append(
            ["table2", label, repr(np.sqrt(direct)), "" if closed is None else repr(np.sqrt(closed))]
        )
    return rows


def _run_fig9(cfg: ExperimentConfig):
    params = cfg.model_params()
    n_s, r, seed = int(cfg.sampling["n_s"]), int(cfg.sampling.get("r", 2000)), cfg.seed
    lengths = cfg.lengths()
    basis = pauli_basis(2, 2)
    idle = build_gate(params, "I", basis)
    shift = int(cfg.test.get("spam_shift", 200))
    rows = []
    for s_index, (series, frame_name) in enumerate(
        (("scheme_I", "standard x standard"), ("scheme_II", "sic x sic"))
    ):
        frame = _frame_by_name(frame_name)
        spam = SpamConfig.ideal(frame, basis)
        offset = -ideal_log_det(frame)
        true_ps = id_true_matrices("I", lengths, {"I": idle}, spam)
        rows += _gate_ensemble_rows(series, true_ps, offset, lengths.astype(float), n_s, r, seed + s_index, 4)
        if shift:
            shifted = id_true_matrices("I", lengths + shift, {"I": idle}, spam)
            rows += _gate_ensemble_rows(
                f"{series}_shifted", shifted, offset, lengths.astype(float), n_s, r, seed + 10 + s_index, 4
            )
    rows += _table2_rows()
    return ["series", "rep", "beta0", "beta1", "u_hat"], rows


def _run_toy(cfg: ExperimentConfig):
    m = cfg.raw["model"]
    phi, nzb = float(m["phi"]), float(m["nzb"])
    a_pi, a_pi2 = float(m["alpha_pi"]), float(m["alpha_pi2"])
    n_s, seed = int(cfg.sampling["n_s"]), cfg.seed
    r_hist = int(cfg.sampling.get("r", 200))
    total = int(cfg.test.get("m", 250))
    step = max(total // 50, 1)
    gates, spam, frame = toy_model(phi, nzb, a_pi, a_pi2)
    offset = -ideal_log_det(frame)
    splits = [(m1, total - m1) for m1 in range(0, total + 1, step)]
    seqs = [toy_sequence(m1, m2) for m1, m2 in splits]
    xs = np.array([m1 for m1, _ in splits], dtype=float)

    rows = []
    pd_obs = pd_test(seqs, gates, spam, frame, n_s=n_s, seed=seed, xs=xs)
    cyc_obs = cycle_test(seqs, gates, spam, r=2, n_s=n_s, seed=seed + 1, xs=xs)
    lengths = cfg.lengths()
    id_ps = family_true_matrices([toy_sequence(0, int(mm)) for mm in lengths], gates, spam)
    ys, variances = logdet_ensemble(id_ps, offset, n_s, 1, seed + 2)
    for label, obs in (("pd_curve", pd_obs), ("cycle_curve", cyc_obs)):
        for x, y, v in zip(obs.xs, obs.ys, obs.variances):
            rows.append([label, repr(float(x)), repr(float(y)), repr(float(np.sqrt(v)))])
    for x, y, v in zip(lengths.astype(float), ys[0], variances[0]):
        rows.append(["id_curve", repr(x), repr(float(y)), repr(float(np.sqrt(v)))])

    # p-value samples under repeated sampling
    pd_true = family_true_matrices(seqs, gates, spam)
    p0 = probability_matrix(None, spam)
    ys_pd, var_pd = logdet_ensemble(pd_true, offset, n_s, r_hist, seed + 3)
    chi_pd, _, _ = _wls_chi2_batch(xs, ys_pd, var_pd, 1)
    ys_cy, var_cy = moment_ensemble(pd_true, p0, 2, n_s, r_hist, seed + 4)
    chi_cy, _, _ = _wls_chi2_batch(xs, ys_cy, var_cy, 1)
    ys_id, var_id = logdet_ensemble(id_ps, offset, n_s, r_hist, seed + 5)
    chi_id, _, _ = _wls_chi2_batch(lengths.astype(float), ys_id, var_id, 2)
    m_pd, m_id = len(xs), len(lengths)
    for label, pvals in (
        ("pd_pvalue", chi2_survival(chi_pd, m_pd - 1)),
        ("cycle_pvalue", chi2_survival(chi_cy, m_pd - 1)),
        ("id_pvalue", chi2_survival(chi_id, m_id - 2)),
    ):
        for i, p in enumerate(pvals):
            rows.append([label, str(i), repr(float(p)), ""])
    return ["series", "x", "y", "sigma"], rows


_RUNNERS = {
    "fig2": _run_fig2,
    "fig3": lambda cfg: _run_power(cfg, cfg.test.get("kind", "id")),
    "fig4": lambda cfg: _run_power(cfg, cfg.test.get("kind", "cycle")),
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "fig8": _run_fig8,
    "fig9": _run_fig9,
    "toy-model": _run_toy,
}


def run(cfg: ExperimentConfig, output_dir=".") -> tuple[Path, Path]:
    """Execute an experiment; returns the paths of the CSV and manifest."""
    header, rows = _RUNNERS[cfg.experiment](cfg)
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{cfg.output}.csv"
    manifest_path = out_dir / f"{cfg.output}.manifest.json"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    manifest = {
        "experiment": cfg.experiment,
        "config": cfg.raw,
        "config_sha256": cfg.sha256(),
        "seed": cfg.seed,
        "version": __version__,
        "columns": header,
        "notes": {
            "phi_scale": "stored unscaled (dimensionless J * t_g); "
            "conventional axes display phi times 1e3 or 1e4"
        },
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, manifest_path


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the pre-run checks: (name, passed, detail) triples."""

    checks: tuple[tuple[str, bool, str], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def lines(self) -> list[str]:
        return [f"[{'pass' if ok else 'FAIL'}] {name}: {detail}" for name, ok, detail in self.checks]


def validate(cfg: ExperimentConfig) -> ValidationReport:
    """Check frame completeness, stationarity and sequence-length sanity.

    Purely diagnostic: no outputs are written and failures are reported
    rather than raised.
    """
    checks = []
    frame_name = cfg.raw.get("frame", "standard")
    try:
        frame = _frame_by_name(frame_name)
        det0 = float(np.exp(ideal_log_det(frame)))
        checks.append(("frame_completeness", det0 != 0.0, f"det P0_ideal({frame_name}) = {det0:.6g}"))
    except (ConfigError, ValueError) as exc:
        checks.append(("frame_completeness", False, str(exc)))
        frame = None

    if "model" in cfg.raw and cfg.experiment != "toy-model":
        try:
            params = cfg.model_params()
            checks.append(
                ("stationarity", True, f"nz_a = {params.nz_a:.6g}, nz_b = {params.nz_b:.6g} consistent with rates")
            )
        except ConfigError as exc:
            checks.append(("stationarity", False, str(exc)))
            params = None
        uses_lengths = "lengths" in cfg.test or cfg.experiment in ("fig2", "fig3", "fig4", "fig5", "fig9")
        if params is not None and uses_lengths:
            try:
                lengths = cfg.lengths()
                if cfg.experiment == "fig9":
                    basis = pauli_basis(2, 2)
                    spam = SpamConfig.ideal(_frame_by_name("sic x sic"), basis)
                    gates = {"I": build_gate(params, "I", basis)}
                else:
                    gates, spam, _ = zz_context(params)
                p_max = id_true_matrices("I", [int(lengths[-1])], gates, spam)[-1]
                cond = float(np.linalg.cond(p_max.entries))
                checks.append(
                    ("sequence_length", cond < 1e12, f"cond(P at m={lengths[-1]}) = {cond:.3e}")
                )
            except (NumericalError, ConfigError) as exc:
                checks.append(("sequence_length", False, str(exc)))
    return ValidationReport(tuple(checks))
