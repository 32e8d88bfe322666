"""Boolean verdicts with residuals for every characterization family.

Each checker turns one family of equivalent (or chained) conditions into a
ConditionReport: per-condition booleans with nonnegative residuals, a
consistency verdict, and an indeterminate flag raised whenever a residual
falls in the ambiguity band between the equality tolerance and ten times
it.  Equivalence families must agree on every instance outside the band;
that agreement is what the acceptance suite asserts at scale.

Families (identifiers follow the report schema):

* T3.3  - five equivalent forms of "the map preserves the state's entropy"
* C3.8  - entropy preservation forces inner-product preservation; for a
          pinching map, entropy is fixed iff the state lies in the target
          algebra
* T3.10 - the inequality chain among the pair's entropies plus the four
          equality characterizations
* C3.11 - full-rank states with H_lambda_b = S_out force the flat output
* T3.14 - five equivalent forms of "the pair's bistochastic matrix carries
          zero weighted entropy"
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import channels, pair_analysis
from .errors import ValidationError

DEFAULT_TOL_COEFF = 1e-8
AMBIGUITY_FACTOR = 10.0
ENV_TOL = "ENTROPYLAB_TOL"


def resolve_tolerance(n, tol=None):
    """Equality tolerance: explicit argument wins, then the ENTROPYLAB_TOL
    environment variable, then 1e-8 * max(1, n)."""
    if tol is not None:
        return float(tol)
    env = os.environ.get(ENV_TOL)
    if env is not None and env.strip():
        return float(env)
    return DEFAULT_TOL_COEFF * max(1.0, float(n))


@dataclass
class Condition:
    label: str
    holds: bool
    residual: float


@dataclass
class ConditionReport:
    theorem: str
    conditions: list
    consistent: bool
    indeterminate: bool
    tolerance: float
    witness: np.ndarray = None
    notes: tuple = field(default_factory=tuple)

    def condition(self, label):
        for c in self.conditions:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def violation(self):
        return (not self.consistent) and (not self.indeterminate)


def _cond(label, residual, tol):
    residual = float(abs(residual))
    return Condition(label=label, holds=residual <= tol, residual=residual)


def _in_band(residual, tol):
    return tol < residual < AMBIGUITY_FACTOR * tol


def _finish(theorem, conditions, tol, consistent, witness=None, notes=()):
    indeterminate = any(_in_band(c.residual, tol) for c in conditions)
    return ConditionReport(
        theorem=theorem,
        conditions=conditions,
        consistent=bool(consistent),
        indeterminate=bool(indeterminate),
        tolerance=tol,
        witness=witness,
        notes=tuple(notes),
    )


def check_t33(pair, tol=None):
    """Five equivalent conditions: entropy preservation, the transposed
    transport identity, spectrum equality, unitary equivalence through the
    connecting unitary, and inversion by the adjoint."""
    tol = resolve_tolerance(pair.n, tol)
    d = pair.rho.matrix
    u = pair.connecting_unitary
    phi_star_phi_d = channels.apply(channels.hs_adjoint(pair.phi), pair.phi_d)
    conds = [
        _cond("i:entropy-preserved", pair.s_out - pair.s_rho, tol),
        _cond("ii:lam=mu.bT", np.max(np.abs(pair.lam - pair.mu @ pair.b.T)), tol),
        _cond("iii:lam=mu", np.max(np.abs(pair.lam - pair.mu)), tol),
        _cond(
            "iv:unitary-equivalence",
            np.linalg.norm(pair.phi_d - u @ d @ u.conj().T),
            tol,
        ),
        _cond("v:adjoint-inverts", np.linalg.norm(phi_star_phi_d - d), tol),
    ]
    flags = [c.holds for c in conds]
    return _finish("T3.3", conds, tol, all(flags) or not any(flags), witness=u)


def check_c38(pair, tol=None, require_expectation=False):
    """Entropy preservation implies <Phi(D), Phi(e_k)> = <D, e_k> for all k;
    when the map is a pinching, entropy is fixed iff it fixes the state."""
    tol = resolve_tolerance(pair.n, tol)
    d = pair.rho.matrix
    premise = _cond("premise:entropy-preserved", pair.s_out - pair.s_rho, tol)
    gaps = [
        (pair.phi_d.conj() * pair.phi_e[k]).sum()
        - (d.conj() * pair.e_projs[k]).sum()
        for k in range(pair.n)
    ]
    conclusion = _cond("inner-products-match", np.max(np.abs(gaps)), tol)
    conds = [premise, conclusion]
    consistent = (not premise.holds) or conclusion.holds
    notes = []
    is_expectation = pair.phi.provenance == "cond-expectation"
    if require_expectation and not is_expectation:
        raise ValidationError(
            "pinching clause requested but the map is not a conditional "
            f"expectation (provenance {pair.phi.provenance!r})"
        )
    if is_expectation:
        fixed = _cond("entropy-fixed", pair.s_out - pair.s_rho, tol)
        member = _cond("state-in-algebra", np.linalg.norm(d - pair.phi_d), tol)
        conds += [fixed, member]
        consistent = consistent and (fixed.holds == member.holds)
    else:
        notes.append("pinching clause skipped: map is not a conditional expectation")
    return _finish("C3.8", conds, tol, consistent, notes=notes)


def check_t310(pair, tol=None):
    """Inequality chain plus the four equality characterizations."""
    tol = resolve_tolerance(pair.n, tol)
    sets = pair_analysis.index_sets(pair)
    jl = sorted(sets.J_lambda)
    ineqs = [
        _cond("ineq:S_rho_phi<=H_lam", max(0.0, pair.s_rho_phi - pair.h_lambda_b), tol),
        _cond("ineq:H_lam<=S_out", max(0.0, pair.h_lambda_b - pair.s_out), tol),
        _cond(
            "ineq:S_out<=S_rho+S_rho_phi",
            max(0.0, pair.s_out - (pair.s_rho + pair.s_rho_phi)),
            tol,
        ),
        _cond("ineq:S_rho<=S_out", max(0.0, pair.s_rho - pair.s_out), tol),
    ]
    b_image = np.einsum("ij,jkl->ikl", pair.b, pair.p_projs)
    r2 = max(float(np.linalg.norm(pair.phi_e[i] - b_image[i])) for i in jl)
    r3 = max(float(np.max(np.abs(pair.b[i] - pair.mu))) for i in jl)
    r4 = max(float(np.linalg.norm(pair.phi_d - pair.phi_e[i])) for i in jl)
    clauses = [
        (_cond("2L:S_rho_phi=H_lam", pair.s_rho_phi - pair.h_lambda_b, tol),
         _cond("2R:images-in-B", r2, tol)),
        (_cond("3L:H_lam=S_out", pair.h_lambda_b - pair.s_out, tol),
         _cond("3R:b-rows-equal-mu", r3, tol)),
        (_cond("4L:S_rho_phi=S_out", pair.s_rho_phi - pair.s_out, tol),
         _cond("4R:images-collapse", r4, tol)),
        (_cond("5L:S_out=S_rho+S_rho_phi",
               pair.s_out - (pair.s_rho + pair.s_rho_phi), tol),
         _cond("5R:rho-pure", pair.s_rho, tol)),
    ]
    conds = ineqs + [c for pairc in clauses for c in pairc]
    consistent = all(c.holds for c in ineqs) and all(
        left.holds == right.holds for left, right in clauses
    )
    return _finish("T3.10", conds, tol, consistent)


def check_c311(pair, tol=None, eps_zero=pair_analysis.EPS_ZERO):
    """For full-rank states, H_lambda_b = S_out forces the uniform output
    spectrum, both entropies at ln n, and a flat b (Hadamard-type)."""
    tol = resolve_tolerance(pair.n, tol)
    if float(pair.lam[-1]) <= eps_zero:
        raise ValidationError(
            f"hypothesis violated: state is rank-deficient (min weight "
            f"{pair.lam[-1]:.3e})"
        )
    n = pair.n
    log_n = math.log(n)
    premise = _cond("premise:H_lam=S_out", pair.h_lambda_b - pair.s_out, tol)
    conclusions = [
        _cond("mu-uniform", np.max(np.abs(pair.mu - 1.0 / n)), tol),
        _cond("S_out=log-n", pair.s_out - log_n, tol),
        _cond("H_lam=log-n", pair.h_lambda_b - log_n, tol),
        _cond("b-flat", np.max(np.abs(pair.b - 1.0 / n)), tol),
    ]
    consistent = (not premise.holds) or all(c.holds for c in conclusions)
    return _finish("C3.11", [premise] + conclusions, tol, consistent)


def _branch_matching_residual(pair, jl, tol):
    """Best pairing residual for T3.14 condition 1: nearest output weight,
    then projection-distance confirmation, smallest index on ties."""
    worst = 0.0
    mapping = {}
    for i in jl:
        gaps = np.abs(pair.lam[i] - pair.mu)
        near = [j for j in range(pair.n) if gaps[j] <= tol]
        if near:
            dists = [float(np.linalg.norm(pair.phi_e[i] - pair.p_projs[j])) for j in near]
            k = int(np.argmin(dists))
            j_star, dist = near[k], dists[k]
        else:
            j_star = int(np.argmin(gaps))
            dist = float(np.linalg.norm(pair.phi_e[i] - pair.p_projs[j_star]))
        mapping[i] = j_star
        worst = max(worst, max(float(gaps[j_star]), dist))
    return worst, mapping


def check_t314(pair, tol=None):
    """Five equivalent conditions anchored at H_lambda_b = 0."""
    tol = resolve_tolerance(pair.n, tol)
    sets = pair_analysis.index_sets(pair)
    jl = sorted(sets.J_lambda)
    d = pair.rho.matrix
    u = pair.connecting_unitary
    match_residual, mapping = _branch_matching_residual(pair, jl, tol)
    phi_star_phi_d = channels.apply(channels.hs_adjoint(pair.phi), pair.phi_d)
    conds = [
        _cond("0:H_lam-zero", pair.h_lambda_b, tol),
        _cond("1:branches-match", match_residual, tol),
        _cond("2:entropy-preserved", pair.s_out - pair.s_rho, tol),
        _cond(
            "3:unitary-equivalence",
            np.linalg.norm(pair.phi_d - u @ d @ u.conj().T),
            tol,
        ),
        _cond("4:adjoint-inverts", np.linalg.norm(phi_star_phi_d - d), tol),
    ]
    flags = [c.holds for c in conds]
    notes = ("branch map " + repr(mapping),) if conds[1].holds else ()
    return _finish(
        "T3.14", conds, tol, all(flags) or not any(flags), witness=u, notes=notes
    )


ALL_CHECKS = ("T3.3", "C3.8", "T3.10", "C3.11", "T3.14")


def check_all(pair, tol=None, eps_zero=pair_analysis.EPS_ZERO):
    """All applicable reports for one analyzed pair; C3.11 only when its
    full-rank hypothesis holds."""
    reports = [
        check_t33(pair, tol),
        check_c38(pair, tol),
        check_t310(pair, tol),
        check_t314(pair, tol),
    ]
    if float(pair.lam[-1]) > eps_zero:
        reports.insert(3, check_c311(pair, tol))
    return reports


@dataclass
class SuiteResult:
    count: int
    reports: list
    violations: list
    indeterminate: list

    @property
    def exit_code(self):
        if self.violations:
            return 2
        if self.indeterminate:
            return 3
        return 0


def run_suite(instances, tol=None):
    """Analyze and check every (state, map) instance; aggregate verdicts in
    instance order."""
    all_reports = []
    violations = []
    indeterminate = []
    for idx, (rho, phi) in enumerate(instances):
        pair = pair_analysis.analyze(rho, phi)
        reports = check_all(pair, tol)
        all_reports.append(reports)
        for rep in reports:
            if rep.violation:
                violations.append((idx, rep.theorem))
            elif rep.indeterminate:
                indeterminate.append((idx, rep.theorem))
    return SuiteResult(
        count=len(all_reports),
        reports=all_reports,
        violations=violations,
        indeterminate=indeterminate,
    )
