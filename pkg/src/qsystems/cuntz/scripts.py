"""Line-oriented scripts for exact operator identities.

Statements::

    context NAME                   # chiral | fermi | ising2d | boundary
    let NAME := EXPR
    check LHS == RHS [depth N]     # exact equality (completeness-resolved)
    checknot LHS == RHS [depth N]  # must *fail* (e.g. graded locality)

Expressions use ``+ - *``, parentheses, postfix ``'`` for the adjoint,
scalars (integers, fractions ``p/q``, ``sqrt2``, ``fourthroot2``, ``i``,
``zeta`` = e^{i pi/8}), names exported by the context or bound by ``let``,
and function application for endomorphisms (``theta(...)``, ``tau(...)``,
``sigma(...)``) and the extension calculus (``emul(a,b)``, ``estar(a)``,
``eexp(a)``, constant ``eone``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .scalars import Ex, I, SQRT2, ROOT4_2, ZETA
from .words import OperatorExpr, CuntzError
from . import contexts as _ctx

__all__ = ["ScriptError", "CheckResult", "ScriptReport", "run_script"]


class ScriptError(Exception):
    pass


@dataclass
class CheckResult:
    line_no: int
    source: str
    passed: bool
    residual_terms: int = 0


@dataclass
class ScriptReport:
    name: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        n_pass = sum(c.passed for c in self.checks)
        lines = [f"{self.name}: {n_pass}/{len(self.checks)} identities hold"]
        for c in self.checks:
            if not c.passed:
                lines.append(f"  FAIL line {c.line_no}: {c.source} "
                             f"({c.residual_terms} residual terms)")
        return "\n".join(lines)


_TOKEN = re.compile(r"\s*(:=|==|[(),'*+-]|[A-Za-z_][A-Za-z_0-9]*|\d+/\d+|\d+)")

_SCALARS = {
    "sqrt2": SQRT2,
    "fourthroot2": ROOT4_2,
    "i": I,
    "zeta": ZETA,
}


def _tokenize(src: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            if src[pos:].strip():
                raise ScriptError(f"cannot tokenize {src[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, env, funcs):
        self.toks = tokens
        self.pos = 0
        self.env = env
        self.funcs = funcs

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ScriptError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise ScriptError(f"expected {tok!r}, got {got!r}")

    def parse(self) -> OperatorExpr:
        e = self.expr()
        if self.peek() is not None:
            raise ScriptError(f"trailing tokens at {self.peek()!r}")
        return e

    def expr(self) -> OperatorExpr:
        e = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> OperatorExpr:
        e = self.factor()
        while self.peek() == "*":
            self.next()
            e = e * self.factor()
        return e

    def factor(self) -> OperatorExpr:
        if self.peek() == "-":
            self.next()
            return Ex.rational(-1) * self.factor()
        e = self.atom()
        while self.peek() == "'":
            self.next()
            e = e.dagger()
        return e

    def atom(self) -> OperatorExpr:
        tok = self.next()
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        if re.fullmatch(r"\d+/\d+", tok):
            p, q = tok.split("/")
            return OperatorExpr.scalar(Ex.rational(int(p), int(q)))
        if tok.isdigit():
            return OperatorExpr.scalar(Ex.rational(int(tok)))
        if tok in _SCALARS:
            return OperatorExpr.scalar(_SCALARS[tok])
        if self.peek() == "(":
            self.next()
            args = [self.expr()]
            while self.peek() == ",":
                self.next()
                args.append(self.expr())
            self.expect(")")
            fn = self.funcs.get(tok)
            if fn is None:
                raise ScriptError(f"unknown function {tok!r}")
            return fn(*args)
        if tok in self.env:
            return self.env[tok]
        raise ScriptError(f"unknown name {tok!r}")


def _context_bindings(name: str):
    """(env, funcs) pair for a named context."""
    env = {}
    funcs = {}
    if name == "chiral":
        env.update(_ctx.chiral_generators(0))
        endos = _ctx.chiral_endos(0)
        eps = _ctx.chiral_braiding(0)
        env.update({
            "eps_tt": eps[("tau", "tau")], "eps_ts": eps[("tau", "sigma")],
            "eps_st": eps[("sigma", "tau")], "eps_ss": eps[("sigma", "sigma")],
        })
        funcs["tau"] = endos["tau"].apply
        funcs["sigma"] = endos["sigma"].apply
        return env, funcs
    builders = {"fermi": _ctx.fermi_context,
                "ising2d": _ctx.ising2d_context,
                "boundary": _ctx.boundary_context}
    if name not in builders:
        raise ScriptError(f"unknown context {name!r}")
    ctx = builders[name]()
    env.update(ctx.exports)
    env["eone"] = ctx.ext_one
    funcs["theta"] = ctx.theta.apply
    funcs["emul"] = ctx.ext_mul
    funcs["estar"] = ctx.ext_star
    funcs["eexp"] = ctx.ext_exp
    if name == "fermi":
        endos = _ctx.chiral_endos(0)
        funcs["tau"] = endos["tau"].apply
        funcs["sigma"] = endos["sigma"].apply
    for ename, endo in getattr(ctx, "pair_endos", {}).items():
        funcs[ename] = endo.apply
    return env, funcs


def run_script(text: str, name: str = "script") -> ScriptReport:
    """Execute a script and collect one result per check line."""
    report = ScriptReport(name=name)
    env: dict = {}
    funcs: dict = {}
    have_context = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("context "):
            env, funcs = _context_bindings(line.split(None, 1)[1].strip())
            have_context = True
            continue
        if line.startswith("let "):
            body = line[4:]
            if ":=" not in body:
                raise ScriptError(f"line {line_no}: let needs ':='")
            lhs, rhs = body.split(":=", 1)
            env[lhs.strip()] = _Parser(_tokenize(rhs), env, funcs).parse()
            continue
        negate = line.startswith("checknot ")
        if line.startswith("check ") or negate:
            body = line.split(None, 1)[1]
            depth = 2
            m = re.search(r"\bdepth\s+(\d+)\s*$", body)
            if m:
                depth = int(m.group(1))
                body = body[:m.start()].rstrip()
            if "==" not in body:
                raise ScriptError(f"line {line_no}: check needs '=='")
            lhs_s, rhs_s = body.split("==", 1)
            lhs = _Parser(_tokenize(lhs_s), env, funcs).parse()
            rhs = _Parser(_tokenize(rhs_s), env, funcs).parse()
            equal = lhs.equals(rhs, depth=depth)
            passed = (not equal) if negate else equal
            diff_terms = 0 if equal else len((lhs - rhs).terms)
            report.checks.append(CheckResult(line_no, line, passed, diff_terms))
            continue
        raise ScriptError(f"line {line_no}: cannot parse {raw!r}")
    if not have_context and report.checks:
        raise ScriptError("script has checks but never declared a context")
    return report
