"""Shipped verification suites for the concrete Ising computations.

``example2`` .. ``example6`` run the corresponding script files with exact
arithmetic; ``classifier-crosscheck`` recomputes the Ising boundary
classification symbolically (structure constants, minimal idempotents and
boundary values) and compares it with the numeric pipeline at 1e-12.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .scalars import Ex
from .words import CuntzError
from .contexts import boundary_context, fermi_context, express_in_basis
from .scripts import ScriptReport, CheckResult, run_script

__all__ = ["suite_names", "run_suite"]

_SCRIPT_SUITES = ("example2", "example3", "example4", "example5", "example6")


def suite_names() -> list[str]:
    return list(_SCRIPT_SUITES) + ["classifier-crosscheck"]


def run_suite(name: str) -> ScriptReport:
    if name in _SCRIPT_SUITES:
        text = resources.files("qsystems.cuntz").joinpath(
            f"data/{name}.txt").read_text(encoding="utf-8")
        return run_script(text, name=name)
    if name in ("classifier-crosscheck", "classifier_crosscheck"):
        return _classifier_crosscheck()
    raise CuntzError(f"unknown suite {name!r}; have {suite_names()}")


def _classifier_crosscheck(tol: float = 1e-12) -> ScriptReport:
    """Exact symbolic Ising boundary data versus the numeric classifier."""
    from ..category import build_builtin
    from ..qsystem import canonical_qsystem, fermi_qsystem, verify_qsystem
    from ..boundary import centre_algebra, classify

    report = ScriptReport(name="classifier-crosscheck")

    def record(desc: str, passed: bool):
        report.checks.append(CheckResult(0, desc, bool(passed)))

    ctx = boundary_context()
    one = ctx.ext_one
    B_tt, B_ss = ctx.exports["B_tt"], ctx.exports["B_ss"]
    basis = [one, B_tt, B_ss]

    # exact structure constants f[i, j, :] of the three-dimensional centre
    f_exact = np.zeros((3, 3, 3), dtype=complex)
    ok = True
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            try:
                coeffs = express_in_basis(ctx.ext_mul(bi, bj), basis)
            except CuntzError:
                ok = False
                break
            f_exact[i, j] = [complex(c) for c in coeffs]
    record("exact *-product closes on the B basis", ok)

    ising = build_builtin("ising")
    can = canonical_qsystem(ising)
    alg = centre_algebra(can, can)
    record("structure constants agree with the numeric centre algebra "
           "(1e-12)", float(np.max(np.abs(alg.f - f_exact))) <= tol)

    # exact minimal idempotents and their coefficients over the B basis
    Es = [ctx.exports["E_plus"], ctx.exports["E_minus"], ctx.exports["E_dual"]]
    e_coeffs = []
    ok = True
    for E in Es:
        try:
            e_coeffs.append([complex(c) for c in express_in_basis(E, basis)])
        except CuntzError:
            ok = False
    record("exact idempotents lie in the span of the B basis", ok)

    # exact boundary values: B_tt and B_ss expanded over the idempotents
    vals = {}
    ok = True
    try:
        vals["B_tt"] = [complex(c) for c in express_in_basis(B_tt, Es)]
        vals["B_ss"] = [complex(c) for c in express_in_basis(B_ss, Es)]
        vals["one"] = [complex(c) for c in express_in_basis(one, Es)]
    except CuntzError:
        ok = False
    record("central elements expand over the exact idempotents", ok)

    conds = classify(alg)
    record("boundary-condition count is 3", len(conds) == 3)

    # match numeric conditions to exact idempotents by their value triples
    matched = 0
    agree_vals = True
    agree_idem = True
    if ok:
        for m_exact in range(3):
            triple = (vals["one"][m_exact], vals["B_tt"][m_exact],
                      vals["B_ss"][m_exact])
            for bc in conds:
                if np.max(np.abs(bc.values - np.array(triple))) <= 1e-9:
                    matched += 1
                    agree_vals &= bool(
                        np.max(np.abs(bc.values - np.array(triple))) <= tol)
                    agree_idem &= bool(
                        np.max(np.abs(bc.idempotent
                                      - np.array(e_coeffs[m_exact]))) <= tol)
                    break
    record("numeric conditions match the exact idempotents one-to-one",
           matched == 3)
    record("pi values agree to 1e-12", agree_vals)
    record("idempotent coefficients agree to 1e-12", agree_idem)

    # Fermi Q-system residuals: exactly zero symbolically, <= 1e-12 numerically
    fermi = fermi_context()
    exact_zero = all(expr.equals(type(expr).zero())
                     for expr in fermi.qsystem_residuals().values())
    record("Fermi Q-system relations hold exactly", exact_zero)
    rep = verify_qsystem(fermi_qsystem())
    record("numeric Fermi residuals below 1e-12",
           rep.max_residual <= tol)
    return report
