"""
Experiment Runner
=================
Staged pipelines that turn an ExperimentConfig into CSV/JSON artifacts:

  free fermion   chain → modes (precision ladder) → entropy scan → checks
                 → CSVs, plus decimation when the chain is a zero-field XX chain
  oracle         random XY chains: free-fermion vs dense diagonalization
  concentric     bond-cut average of the concentric pairing vs closed form
  random singlet ensemble decimation → averaged entropy fit against log2 L

Every stage runs under a name. If one fails, a partial manifest recording
the stage and error is written and the exception is re-raised.
"""

import dataclasses
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from src.chain.precision import DOUBLE
from src.chain.profiles import build_concentric_chain, sample_strong_disorder_chain
from src.chain.spec import ChainSpec
from src.config import (
    COMPLEMENT_TOLERANCE,
    CONCENTRIC_AVERAGE_TOLERANCE,
    ENTROPY_BOUND_TOLERANCE,
    ORACLE_AGREEMENT_TOLERANCE,
    ROW_NORM_TOLERANCE,
    get_logger,
)
from src.entanglement.profile import entropy_profile
from src.entanglement.spectrum import complement_entropy
from src.errors import (
    ChainsError,
    DegenerateGroundState,
    InvalidConfig,
    InvariantViolation,
    NumericalFailure,
)
from src.experiments.artifacts import RunManifest, write_csv, write_json
from src.experiments.settings import ExperimentConfig, ExperimentKind
from src.fermions.fallback import Solution, SolverFallbackChain
from src.fermions.solver import CorrelationMatrix, ground_energy
from src.oracle.hamiltonian import Convention, build_dense_hamiltonian
from src.oracle.states import contiguous_block_entropies, ground_state
from src.rg.decimation import decimate
from src.rg.pairing import (
    SingletPairing,
    concentric_average_entropy,
    concentric_pairing,
    position_averaged_pairing_entropy,
)
from src.rg.scaling import (
    RANDOM_SINGLET_SLOPE,
    log_spaced_block_sizes,
    rsp_scaling_fit,
    strong_disorder_ensemble,
)

log = get_logger("Runner")

# Random-singlet slopes further than this from ln2/3 get a manifest warning
_RSP_SLOPE_BAND = 0.3


class ExperimentRunner:
    """Runs one experiment config and owns its manifest."""

    def __init__(self, config: ExperimentConfig, solver: SolverFallbackChain | None = None):
        self.config = config
        self.solver = solver or SolverFallbackChain(config.fallback_bits)
        self.manifest = RunManifest(config=config.to_document())
        self._stage_name: str | None = None
        self._stage_count = 0

    @property
    def output_dir(self) -> Path:
        return self.config.output_dir

    # ── Entry points ──────────────────────────────────────────────────────

    def run(self) -> RunManifest:
        pipelines = {
            ExperimentKind.GAUSSIAN_DECAY: self._free_fermion,
            ExperimentKind.EXPONENTIAL_DECAY: self._free_fermion,
            ExperimentKind.CUSTOM: self._free_fermion,
            ExperimentKind.ORACLE_COMPARE: self._oracle_compare,
            ExperimentKind.CONCENTRIC_AVERAGE: self._concentric_average,
            ExperimentKind.RANDOM_SINGLET: self._random_singlet,
        }
        return self._execute(pipelines[self.config.experiment])

    def run_decimation(self) -> RunManifest:
        """Decimate the config's chain only (the ``rg`` command)."""
        return self._execute(self._decimation_only)

    def _execute(self, pipeline) -> RunManifest:
        log.info(f"Running {self.config.experiment.value} (N={self.config.n_sites}) → {self.output_dir}")
        try:
            with self._stage("prepare-output"):
                try:
                    self.output_dir.mkdir(parents=True, exist_ok=True)
                except OSError as e:
                    raise InvalidConfig(f"cannot create output directory: {e}", field="output.dir") from e
            pipeline()
        except (np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError) as e:
            failure = NumericalFailure(f"{type(e).__name__}: {e}")
            self._fail(failure)
            raise failure from e
        except Exception as e:
            self._fail(e)
            raise

        self.manifest.status = "ok"
        self.manifest.write(self.output_dir)
        log.info(f"✅ Done: {len(self.manifest.files)} file(s), {len(self.manifest.warnings)} warning(s)")
        return self.manifest

    # ── Stage bookkeeping ─────────────────────────────────────────────────

    @contextmanager
    def _stage(self, name: str):
        self._stage_count += 1
        self._stage_name = name
        log.info(f"Stage {self._stage_count}: {name}")
        yield
        self._stage_name = None

    def _fail(self, error: Exception):
        self.manifest.status = "failed"
        self.manifest.failed_stage = self._stage_name
        if isinstance(error, ChainsError):
            self.manifest.error = error.to_dict()
        else:
            self.manifest.error = {"type": type(error).__name__, "message": str(error)}
        log.error(f"❌ Stage '{self._stage_name}' failed: {error}")
        try:
            self.manifest.write(self.output_dir)
        except OSError as e:
            log.error(f"Could not write partial manifest: {e}")

    def _warn(self, message: str):
        log.warning(message)
        self.manifest.warn(message)

    def _report_clipping(self, curve, label: str = ""):
        if curve.clipped:
            largest = max(excess for _, _, excess in curve.clipped)
            self._warn(f"{label}clipped ν_max back to 1 in {len(curve.clipped)} block(s), largest excess {largest:.1e}")

    def _write_csv(self, name: str, header, rows):
        self.manifest.record(write_csv(self.output_dir / name, header, rows))

    def _write_json(self, name: str, document):
        self.manifest.record(write_json(self.output_dir / name, document))

    # ── Shared steps ──────────────────────────────────────────────────────

    def _solve(self, chain: ChainSpec, label: str = "") -> Solution:
        before = len(self.solver.error_log)
        solution = self.solver.solve(chain)
        for attempt in self.solver.error_log[before:]:
            self._warn(f"{label}vacuum ambiguous at {attempt['precision_bits']} bits, escalated: {attempt['error']}")
        return solution

    def _concentric_chain(self) -> ChainSpec:
        cfg = self.config
        chain = build_concentric_chain(cfg.n_sites, cfg.profile, cfg.precision)
        if cfg.field:
            chain = dataclasses.replace(chain, field=[cfg.field] * cfg.n_sites)
        if chain.underflow:
            self._warn(f"{cfg.profile.kind.value} couplings underflow at {cfg.precision_bits} bits; stored as 0")
        return chain

    def _decimation_applies(self, chain: ChainSpec) -> bool:
        if not (chain.is_xx and chain.has_zero_field and chain.n_sites % 2 == 0):
            return False
        if chain.underflow or any(j <= 0 for j in chain.jx):
            self._warn("decimation skipped: some couplings are not strictly positive")
            return False
        return True

    def _write_pairing(self, pairing: SingletPairing):
        self._write_csv("pairing.csv", ["p", "q"], pairing.pairs)
        self._write_json("decimation_log.json", pairing.log_document())
        self.manifest.results["pairing_is_concentric"] = pairing.same_matching(concentric_pairing(pairing.n_sites))

    # ── Free-fermion pipeline ─────────────────────────────────────────────

    def _free_fermion(self):
        cfg = self.config

        with self._stage("build-chain"):
            chain = self._concentric_chain()

        with self._stage("solve"):
            solution = self._solve(chain)
            self.manifest.results["precision_bits"] = solution.precision.bits
            self.manifest.results["ground_energy"] = ground_energy(solution.modes)

        with self._stage("entropy-scan"):
            curve = entropy_profile(solution.correlation, cfg.block_sizes)
            self._report_clipping(curve)

        with self._stage("write-entropy"):
            beta = curve.beta
            self._write_csv(
                "entropy_summary.csv",
                ["L", "S_end_bits", "S_avg_bits", "fro_sq", "L_minus_fro_sq", "beta_est"],
                curve.summary_rows(),
            )
            self._write_csv("entropy_positions.csv", ["L", "position", "S_bits"], curve.position_rows())
            if cfg.dump_correlation:
                g = solution.correlation.g
                self._write_csv("correlation.csv", [f"col_{j}" for j in range(1, cfg.n_sites + 1)], g.tolist())
            if beta is not None:
                self.manifest.results["beta"] = {
                    "value": beta.value,
                    "regime": beta.regime.value,
                    "block_len": beta.block_len,
                }

        with self._stage("invariants"):
            check_entropy_invariants(solution.correlation, curve)

        if self._decimation_applies(chain):
            with self._stage("decimation"):
                self._write_pairing(decimate(chain))

    # ── Oracle comparison ─────────────────────────────────────────────────

    def _oracle_compare(self):
        cfg = self.config
        n = cfg.n_sites
        rng = np.random.default_rng(cfg.seed)
        rows = []
        skipped = 0

        with self._stage("oracle-samples"):
            for sample in range(cfg.samples):
                jx = rng.uniform(0.2, 1.0, n - 1)
                jy = rng.uniform(0.2, 1.0, n - 1)
                field = rng.uniform(0.0, 0.5, n)
                chain = ChainSpec(
                    n, jx, jy, field,
                    precision=cfg.precision,
                    provenance={"builder": "oracle-sample", "seed": cfg.seed, "sample": sample},
                )
                row = self._compare_sample(sample, chain, cfg.convention)
                if row is None:
                    skipped += 1
                else:
                    rows.append(row)

        if not rows:
            raise NumericalFailure(f"all {cfg.samples} oracle samples had a degenerate ground state")

        max_energy = max(r[3] for r in rows)
        max_entropy = max(r[4] for r in rows)

        with self._stage("write-oracle"):
            self._write_csv(
                "oracle_compare.csv",
                ["sample", "energy_dense", "energy_ff", "energy_deviation", "max_entropy_deviation", "precision_bits"],
                rows,
            )
            report = {
                "n_sites": n,
                "convention": cfg.convention.value,
                "samples": cfg.samples,
                "compared": len(rows),
                "skipped": skipped,
                "max_energy_deviation": max_energy,
                "max_entropy_deviation": max_entropy,
                "tolerance": ORACLE_AGREEMENT_TOLERANCE,
            }
            self._write_json("oracle_report.json", report)
            self.manifest.results["oracle"] = report

        with self._stage("invariants"):
            worst = max(max_energy, max_entropy)
            if worst > ORACLE_AGREEMENT_TOLERANCE:
                raise InvariantViolation(
                    f"free-fermion and dense results differ by {worst:.3e} "
                    f"(tolerance {ORACLE_AGREEMENT_TOLERANCE:.0e})"
                )

    def _compare_sample(self, sample: int, chain: ChainSpec, convention: Convention) -> tuple | None:
        state = ground_state(build_dense_hamiltonian(chain, convention))
        if state.degenerate:
            self._warn(f"oracle sample {sample}: dense ground state degenerate (gap {state.gap:.2e}), skipped")
            return None

        fermion_chain = chain if convention == Convention.UNIT else chain.scaled_couplings(0.5)
        try:
            solution = self._solve(fermion_chain, label=f"oracle sample {sample}: ")
        except DegenerateGroundState as e:
            self._warn(f"oracle sample {sample}: {e}; skipped")
            return None

        energy_ff = ground_energy(solution.modes)
        curve = entropy_profile(solution.correlation)
        self._report_clipping(curve, label=f"oracle sample {sample}: ")
        dense = contiguous_block_entropies(state)
        entropy_dev = max(
            abs(value - float(curve.entropies(length)[start - 1]))
            for (start, length), value in dense.items()
        )
        energy_dev = abs(energy_ff - state.energy)
        log.info(f"sample {sample}: ΔE={energy_dev:.2e}, max ΔS={entropy_dev:.2e}")
        return (sample, state.energy, energy_ff, energy_dev, entropy_dev, solution.precision.bits)

    # ── Concentric average ────────────────────────────────────────────────

    def _concentric_average(self):
        n = self.config.n_sites
        sizes = self.config.block_sizes or range(1, n)

        with self._stage("pairing"):
            pairing = concentric_pairing(n)

        with self._stage("average"):
            rows = []
            for length in sizes:
                brute = position_averaged_pairing_entropy(pairing, length)
                closed = concentric_average_entropy(n, length)
                rows.append((length, brute, closed, brute - closed))

        with self._stage("write-average"):
            self._write_csv(
                "concentric_average.csv",
                ["L", "brute_force_bits", "closed_form_bits", "deviation"],
                rows,
            )

        with self._stage("invariants"):
            checked = [r for r in rows if r[0] <= n // 2]
            worst = max((abs(r[3]) for r in checked), default=0.0)
            self.manifest.results["max_deviation_up_to_half"] = worst
            for length, brute, _, deviation in checked:
                if abs(deviation) > CONCENTRIC_AVERAGE_TOLERANCE:
                    raise InvariantViolation(f"L={length}: brute-force average off the closed form by {deviation:.3f} bits")
                if brute < length / 2 - ENTROPY_BOUND_TOLERANCE:
                    raise InvariantViolation(f"L={length}: average entropy {brute:.3f} below L/2")

    # ── Random singlet scaling ────────────────────────────────────────────

    def _random_singlet(self):
        cfg = self.config
        sizes = cfg.block_sizes or log_spaced_block_sizes(2, max(4, cfg.n_sites // 8))
        seeds = range(cfg.seed, cfg.seed + cfg.samples)

        with self._stage("ensemble"):
            ensemble = strong_disorder_ensemble(cfg.n_sites, cfg.delta, seeds)

        with self._stage("fit"):
            fit = rsp_scaling_fit(ensemble, sizes)

        with self._stage("write-scaling"):
            self._write_csv("rsp_scaling.csv", ["L", "mean_entropy_bits", "stderr"], fit.summary_rows())
            deviation = fit.slope / RANDOM_SINGLET_SLOPE - 1.0
            self.manifest.results["fit"] = {
                "slope": fit.slope,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "reference_slope": RANDOM_SINGLET_SLOPE,
                "relative_deviation": deviation,
            }
            if abs(deviation) > _RSP_SLOPE_BAND:
                self._warn(f"fitted slope {fit.slope:.4f} is {deviation:+.0%} off ln2/3")

    # ── Decimation only ───────────────────────────────────────────────────

    def _decimation_only(self):
        cfg = self.config
        with self._stage("build-chain"):
            if cfg.experiment == ExperimentKind.RANDOM_SINGLET:
                chain = sample_strong_disorder_chain(cfg.n_sites, cfg.delta, cfg.seed, DOUBLE)
            elif cfg.experiment == ExperimentKind.ORACLE_COMPARE:
                raise InvalidConfig("oracle-compare chains are random XY chains; decimation needs an XX chain",
                                    field="experiment")
            else:
                chain = self._concentric_chain()

        with self._stage("decimation"):
            self._write_pairing(decimate(chain))


# ─── Invariant checks ────────────────────────────────────────────────────────

def check_entropy_invariants(correlation: CorrelationMatrix, curve):
    """0 <= S <= L, rows of G within the unit ball, S(end block) = S(rest)."""
    n = correlation.n_sites
    rows = correlation.squared_row_sums()
    if rows.size and rows.max() > 1.0 + ROW_NORM_TOLERANCE:
        raise InvariantViolation(f"row of G has squared norm {rows.max():.12f} > 1")

    for length, scan in curve.scans.items():
        low, high = float(scan.entropies.min()), float(scan.entropies.max())
        if low < -ENTROPY_BOUND_TOLERANCE or high > length + ENTROPY_BOUND_TOLERANCE:
            raise InvariantViolation(f"L={length}: entropy range [{low}, {high}] outside [0, {length}]")
        if length < n:
            rest = complement_entropy(correlation, 1, length)
            if abs(rest - scan.end_entropy) > COMPLEMENT_TOLERANCE:
                raise InvariantViolation(
                    f"L={length}: end block {scan.end_entropy:.10f} bits vs complement {rest:.10f} bits"
                )


def run_experiment(config: ExperimentConfig) -> RunManifest:
    return ExperimentRunner(config).run()


def run_decimation(config: ExperimentConfig) -> RunManifest:
    return ExperimentRunner(config).run_decimation()
