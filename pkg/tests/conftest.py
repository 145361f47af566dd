from __future__ import annotations

import sympy

from lmatrix.fields import field_make


def sympy_rank(M) -> int:
    """Rank via sympy, used as an independent oracle (Q and quadratic fields)."""
    ctx = M.ctx
    if ctx.kind == "rational":
        return sympy.Matrix(M.rows, M.cols, [sympy.Rational(x.numerator, x.denominator)
                                             for x in M.entries]).rank()
    if ctx.kind == "prime":
        from sympy.polys.matrices import DomainMatrix
        from sympy import GF
        dm = DomainMatrix([[GF(ctx.p)(int(x)) for x in M.row(i)] for i in range(M.rows)],
                          (M.rows, M.cols), GF(ctx.p))
        return dm.rank()
    # number field: substitute a root symbolically in the algebraic field
    t = sympy.Symbol("t")
    f = sum(c * t ** i for i, c in enumerate(ctx.modulus))
    root = sympy.CRootOf(sympy.Poly(f, t), 0) if ctx.degree > 2 else sympy.solve(f, t)[0]
    K = sympy.QQ.algebraic_field(root)
    from sympy.polys.matrices import DomainMatrix

    def conv(x):
        return K.from_sympy(sum(sympy.Rational(c.numerator, c.denominator) * root ** i
                                for i, c in enumerate(x.c)))
    dm = DomainMatrix([[conv(x) for x in M.row(i)] for i in range(M.rows)], (M.rows, M.cols), K)
    return dm.rank()


QQ = field_make("QQ")


# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary
_ACCEPTANCE: list = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, dur in _ACCEPTANCE:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({dur:.2f} s)")
