"""Operator spec files: parsing, elaboration, canonical printing.

A spec is a sectioned plain-text file:

    [operator]
    name = qg-munk-strip
    nvars = 1
    order = 4
    expr = i*eps^-1*xin - r*(zeta1^2 + (1 + chi^2)*xin^2)

    [params]
    Re = 1
    r = 1

    [boundary.west]
    curve = graph
    chi = s/2
    samples = -1, -1/2, 0, 1/2, 1
    expr = ...            # optional per-component override

    [bc.west]
    condition = order 0, g 0
    condition = order 1, g 0

Expression grammar (LL(1); ``^`` binds tightest, then unary minus):

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := ['-'] INT | '(' ['-'] INT ['/' INT] ')'
    atom     := NUMBER | 'i' | 'eps' | 'xin' | 'zetaN' | IDENT
              | IDENT '(' expr ')' | '(' expr ')'

Rational exponents must be literals and are only legal on ``eps``;
``xin``/``zeta`` powers must be nonnegative integers.  Division is only
defined by (elaborated) nonzero constants.  ``chi`` names the boundary
slope parameter, bound per sample from the component's ``chi`` entry
(for graph curves) or from the built-in circle rule.  Function calls
(sin, cos, sqrt) are allowed only in ``chi``/data expressions, never in
operator symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .errors import ParseError, StructuralError
from .sympoly import CRat, CR_I, SymbolPoly

# ----------------------------------------------------------------------
# expression AST
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction = Fraction(0)


@dataclass(frozen=True)
class Name(Expr):
    # one of: "i", "eps", "xin", "zetaN", "chi", "s", or a parameter
    ident: str = ""


@dataclass(frozen=True)
class Bin(Expr):
    op: str = "+"
    lhs: Expr = None
    rhs: Expr = None


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr = None


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr = None
    exponent: Fraction = Fraction(1)


@dataclass(frozen=True)
class Call(Expr):
    func: str = ""
    arg: Expr = None


# ----------------------------------------------------------------------
# tokenizer
# ----------------------------------------------------------------------

_SYMBOLS = "+-*/^()"


@dataclass
class _Tok:
    kind: str  # NUM, IDENT, SYM, END
    text: str
    line: int
    col: int


def _tokenize(src: str, line: int, col0: int) -> List[_Tok]:
    toks: List[_Tok] = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch in " \t":
            i += 1
            continue
        col = col0 + i
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            seen_dot = False
            seen_exp = False
            while j < n:
                c = src[j]
                if c.isdigit():
                    j += 1
                elif c == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif c in "eE" and not seen_exp and j + 1 < n and (
                        src[j + 1].isdigit() or src[j + 1] in "+-"):
                    # scientific notation only when digits follow
                    k = j + 1 + (src[j + 1] in "+-")
                    if k < n and src[k].isdigit():
                        seen_exp = True
                        j = k
                    else:
                        break
                else:
                    break
            toks.append(_Tok("NUM", src[i:j], line, col))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("IDENT", src[i:j], line, col))
            i = j
        elif ch in _SYMBOLS:
            toks.append(_Tok("SYM", ch, line, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("END", "", line, col0 + n))
    return toks


class _ExprParser:
    def __init__(self, toks: List[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect_sym(self, sym: str) -> _Tok:
        t = self.next()
        if t.kind != "SYM" or t.text != sym:
            raise ParseError(f"expected {sym!r}, found {t.text!r}",
                             t.line, t.col)
        return t

    def parse(self) -> Expr:
        e = self.expr()
        t = self.peek()
        if t.kind != "END":
            raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().kind == "SYM" and self.peek().text in "+-":
            op = self.next()
            rhs = self.term()
            e = Bin(op.line, op.col, op.text, e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().kind == "SYM" and self.peek().text in "*/":
            op = self.next()
            rhs = self.unary()
            e = Bin(op.line, op.col, op.text, e, rhs)
        return e

    def unary(self) -> Expr:
        t = self.peek()
        if t.kind == "SYM" and t.text == "-":
            self.next()
            return Neg(t.line, t.col, self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        t = self.peek()
        if t.kind == "SYM" and t.text == "^":
            self.next()
            exponent = self.exponent_literal()
            return Pow(t.line, t.col, base, exponent)
        return base

    def exponent_literal(self) -> Fraction:
        t = self.next()
        sign = 1
        if t.kind == "SYM" and t.text == "-":
            sign = -1
            t = self.next()
        if t.kind == "SYM" and t.text == "(":
            inner = self.next()
            isign = sign
            if inner.kind == "SYM" and inner.text == "-":
                isign = -sign
                inner = self.next()
            if inner.kind != "NUM" or "." in inner.text:
                raise ParseError("exponent must be an integer or rational "
                                 "literal", inner.line, inner.col)
            num = int(inner.text)
            den = 1
            if self.peek().kind == "SYM" and self.peek().text == "/":
                self.next()
                dt = self.next()
                if dt.kind != "NUM" or "." in dt.text:
                    raise ParseError("exponent denominator must be an "
                                     "integer", dt.line, dt.col)
                den = int(dt.text)
            self.expect_sym(")")
            return Fraction(isign * num, den)
        if t.kind != "NUM" or "." in t.text:
            raise ParseError("exponent must be an integer or rational "
                             "literal", t.line, t.col)
        return Fraction(sign * int(t.text))

    def atom(self) -> Expr:
        t = self.next()
        if t.kind == "NUM":
            if "." in t.text or "e" in t.text or "E" in t.text:
                # exact rational image of the parsed double
                return Num(t.line, t.col, Fraction(float(t.text)))
            return Num(t.line, t.col, Fraction(int(t.text)))
        if t.kind == "IDENT":
            if self.peek().kind == "SYM" and self.peek().text == "(":
                self.next()
                arg = self.expr()
                self.expect_sym(")")
                return Call(t.line, t.col, t.text, arg)
            return Name(t.line, t.col, t.text)
        if t.kind == "SYM" and t.text == "(":
            e = self.expr()
            self.expect_sym(")")
            return e
        raise ParseError(f"unexpected token {t.text!r}", t.line, t.col)


def parse_expr(text: str, line: int = 0, col: int = 0) -> Expr:
    return _ExprParser(_tokenize(text, line, col)).parse()


# ----------------------------------------------------------------------
# elaboration: Expr -> SymbolPoly
# ----------------------------------------------------------------------

def elaborate(expr: Expr, nvars: int, env: Dict[str, CRat]) -> SymbolPoly:
    """Turn an operator expression into a SymbolPoly.

    ``env`` binds parameter names (and ``chi``) to exact constants.
    Function calls are rejected here; they belong to slope expressions.
    """
    if isinstance(expr, Num):
        return SymbolPoly.const(nvars, CRat(expr.value))
    if isinstance(expr, Name):
        ident = expr.ident
        if ident == "i":
            return SymbolPoly.const(nvars, CR_I)
        if ident == "eps":
            return SymbolPoly.eps_power(nvars, 1)
        if ident == "xin":
            return SymbolPoly.var_xin(nvars)
        if ident.startswith("zeta") and ident[4:].isdigit():
            k = int(ident[4:])
            if not 1 <= k <= nvars:
                raise ParseError(f"zeta{k} out of range for nvars={nvars}",
                                 expr.line, expr.col)
            return SymbolPoly.var_zeta(nvars, k - 1)
        if ident in env:
            return SymbolPoly.const(nvars, env[ident])
        raise ParseError(f"undefined parameter {ident!r}",
                         expr.line, expr.col)
    if isinstance(expr, Neg):
        return -elaborate(expr.arg, nvars, env)
    if isinstance(expr, Bin):
        lhs = elaborate(expr.lhs, nvars, env)
        rhs = elaborate(expr.rhs, nvars, env)
        if expr.op == "+":
            return lhs + rhs
        if expr.op == "-":
            return lhs - rhs
        if expr.op == "*":
            return lhs * rhs
        # division: rhs must be a nonzero constant
        keys = list(rhs.terms)
        if len(keys) != 1 or keys[0] != (0, (0,) * nvars, 0):
            raise ParseError("division is only defined by nonzero "
                             "constants", expr.line, expr.col)
        return lhs.scale(CRat(Fraction(1)) / rhs.terms[keys[0]])
    if isinstance(expr, Pow):
        q = expr.exponent
        base = expr.base
        if isinstance(base, Name) and base.ident == "eps":
            return SymbolPoly.eps_power(nvars, q)
        if q.denominator != 1:
            raise ParseError("fractional exponents are only legal on eps",
                             expr.line, expr.col)
        if q < 0:
            if isinstance(base, Name) and (base.ident == "xin"
                                           or base.ident.startswith("zeta")):
                raise ParseError(f"negative exponent on {base.ident}",
                                 expr.line, expr.col)
            # negative power of a constant
            b = elaborate(base, nvars, env)
            keys = list(b.terms)
            if len(keys) != 1 or keys[0] != (0, (0,) * nvars, 0):
                raise ParseError("negative exponents are only legal on eps "
                                 "or constants", expr.line, expr.col)
            c = b.terms[keys[0]]
            inv = CRat(Fraction(1)) / c
            out = SymbolPoly.const(nvars, 1)
            for _ in range(-int(q)):
                out = out.scale(inv)
            return out
        return elaborate(base, nvars, env) ** int(q)
    if isinstance(expr, Call):
        raise ParseError(f"function {expr.func!r} is not allowed in "
                         "operator expressions", expr.line, expr.col)
    raise ParseError("malformed expression")


_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
          "sqrt": math.sqrt, "exp": math.exp}


def eval_scalar(expr: Expr, env: Dict[str, Fraction]) -> Fraction:
    """Evaluate a numeric expression (slope/data) to an exact Fraction.

    Pure rational expressions stay exact; sin/cos/sqrt and fractional
    powers go through a double and come back as the exact rational image
    of that double.
    """

    def ev(e: Expr):
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Name):
            if e.ident in env:
                return env[e.ident]
            if e.ident == "pi":
                return math.pi
            raise ParseError(f"undefined name {e.ident!r}", e.line, e.col)
        if isinstance(e, Neg):
            return -ev(e.arg)
        if isinstance(e, Bin):
            a, b = ev(e.lhs), ev(e.rhs)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b == 0:
                raise ParseError("division by zero", e.line, e.col)
            if isinstance(a, Fraction) and isinstance(b, Fraction):
                return a / b
            return float(a) / float(b)
        if isinstance(e, Pow):
            base = ev(e.base)
            if e.exponent.denominator == 1:
                n = int(e.exponent)
                if isinstance(base, Fraction):
                    return base ** n
                return float(base) ** n
            return float(base) ** float(e.exponent)
        if isinstance(e, Call):
            if e.func not in _FUNCS:
                raise ParseError(f"unknown function {e.func!r}",
                                 e.line, e.col)
            return _FUNCS[e.func](float(ev(e.arg)))
        raise ParseError("malformed expression")

    value = ev(expr)
    return value if isinstance(value, Fraction) else Fraction(float(value))


# ----------------------------------------------------------------------
# spec file model
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class TraceCondition:
    """One boundary condition: a normal trace of the given order."""
    order: int
    coeff: Expr
    data: Expr


@dataclass(frozen=True)
class BoundaryComponent:
    id: str
    curve: str                     # "graph" | "circle" | "point"
    chi: Optional[Expr]            # slope expression in s (graph only)
    samples: tuple                 # Fractions
    expr: Optional[Expr]           # per-component symbol override


@dataclass(frozen=True)
class OperatorSpec:
    name: str
    nvars: int
    order: int
    params: tuple                  # ((name, Fraction), ...) sorted
    expr: Optional[Expr]
    components: tuple              # BoundaryComponent, ...
    bcs: tuple                     # ((comp_id, (TraceCondition, ...)), ...)

    def param_map(self) -> Dict[str, Fraction]:
        return dict(self.params)

    def component(self, comp_id: str) -> BoundaryComponent:
        for c in self.components:
            if c.id == comp_id:
                return c
        raise StructuralError(f"no boundary component {comp_id!r}")

    def conditions(self, comp_id: str):
        for cid, conds in self.bcs:
            if cid == comp_id:
                return conds
        return ()


def _parse_rational(text: str, line: int) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num.strip()), int(den.strip()))
        if any(c in text for c in ".eE") and not text.lstrip("+-").isdigit():
            return Fraction(float(text))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad number {text!r}: {exc}", line, 1)


def parse_spec(text: bytes | str) -> OperatorSpec:
    """Parse a spec file; raises ParseError with line/column on failure."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}")

    sections: List[tuple] = []   # (name, line, [(key, value, line), ...])
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, 1)
            current = (stripped[1:-1].strip(), lineno, [])
            if not current[0]:
                raise ParseError("empty section name", lineno, 1)
            sections.append(current)
            continue
        if current is None:
            raise ParseError("content before the first section", lineno, 1)
        if "=" not in line:
            raise ParseError("expected key = value", lineno, 1)
        key, _, value = line.partition("=")
        current[2].append((key.strip(), value.strip(), lineno))

    name = ""
    nvars: Optional[int] = None
    order: Optional[int] = None
    default_expr: Optional[Expr] = None
    params: Dict[str, Fraction] = {}
    components: List[BoundaryComponent] = []
    bcs: Dict[str, List[TraceCondition]] = {}
    seen_operator = False

    for sec_name, sec_line, entries in sections:
        if sec_name == "operator":
            seen_operator = True
            for key, value, ln in entries:
                if key == "name":
                    name = value
                elif key == "nvars":
                    nvars = int(_parse_rational(value, ln))
                elif key == "order":
                    order = int(_parse_rational(value, ln))
                elif key == "expr":
                    default_expr = parse_expr(value, ln)
                else:
                    raise ParseError(f"unknown operator key {key!r}", ln, 1)
        elif sec_name == "params":
            for key, value, ln in entries:
                params[key] = _parse_rational(value, ln)
        elif sec_name.startswith("boundary."):
            comp_id = sec_name[len("boundary."):]
            curve = "graph"
            chi = None
            samples: List[Fraction] = []
            cexpr = None
            for key, value, ln in entries:
                if key == "curve":
                    if value not in ("graph", "circle", "point"):
                        raise ParseError(f"unknown curve kind {value!r}",
                                         ln, 1)
                    curve = value
                elif key == "chi":
                    chi = parse_expr(value, ln)
                elif key == "samples":
                    samples = [_parse_rational(v, ln)
                               for v in value.split(",") if v.strip()]
                elif key == "expr":
                    cexpr = parse_expr(value, ln)
                else:
                    raise ParseError(f"unknown boundary key {key!r}", ln, 1)
            if curve == "graph" and chi is None:
                raise ParseError(f"boundary.{comp_id}: graph curves need a "
                                 "chi (slope) expression", sec_line, 1)
            if curve == "circle" and chi is not None:
                raise ParseError(f"boundary.{comp_id}: the circle brings "
                                 "its own slope rule", sec_line, 1)
            min_samples = 1 if curve == "point" else 3
            if len(samples) < min_samples:
                raise ParseError(f"boundary.{comp_id}: need at least "
                                 f"{min_samples} samples", sec_line, 1)
            if curve == "circle" and any(abs(s) >= 1 for s in samples):
                raise ParseError(f"boundary.{comp_id}: circle samples must "
                                 "satisfy |s| < 1", sec_line, 1)
            components.append(BoundaryComponent(
                comp_id, curve, chi, tuple(samples), cexpr))
        elif sec_name.startswith("bc."):
            comp_id = sec_name[len("bc."):]
            conds = bcs.setdefault(comp_id, [])
            for key, value, ln in entries:
                if key != "condition":
                    raise ParseError(f"unknown bc key {key!r}", ln, 1)
                conds.append(_parse_condition(value, ln))
        else:
            raise ParseError(f"unknown section [{sec_name}]", sec_line, 1)

    if not seen_operator:
        raise ParseError("missing [operator] section")
    if nvars is None or order is None:
        raise ParseError("[operator] must declare nvars and order")
    if nvars < 0 or order <= 0:
        raise ParseError("nvars must be >= 0 and order >= 1")
    if not components:
        raise ParseError("at least one [boundary.<id>] section is required")
    for cid in bcs:
        if all(c.id != cid for c in components):
            raise ParseError(f"[bc.{cid}] has no matching boundary section")

    spec = OperatorSpec(
        name=name or "unnamed",
        nvars=nvars,
        order=order,
        params=tuple(sorted(params.items())),
        expr=default_expr,
        components=tuple(components),
        bcs=tuple(sorted((cid, tuple(conds)) for cid, conds in bcs.items())),
    )
    # Eager elaboration at every sample validates the whole file now.
    for comp in spec.components:
        if comp.expr is None and default_expr is None:
            raise ParseError(f"boundary.{comp.id}: no expr given and no "
                             "default [operator] expr")
        for s in comp.samples:
            elaborate_at_sample(spec, comp.id, s)
    return spec


def _parse_condition(value: str, ln: int) -> TraceCondition:
    order = None
    coeff: Expr = Num(ln, 1, Fraction(1))
    data: Expr = Num(ln, 1, Fraction(0))
    for piece in value.split(","):
        piece = piece.strip()
        if not piece:
            continue
        word, _, rest = piece.partition(" ")
        rest = rest.strip()
        if word == "order":
            order = int(_parse_rational(rest, ln))
        elif word == "coeff":
            coeff = parse_expr(rest, ln)
        elif word == "g":
            data = parse_expr(rest, ln)
        else:
            raise ParseError(f"unknown condition field {word!r}", ln, 1)
    if order is None or order < 0:
        raise ParseError("condition needs a nonnegative 'order k'", ln, 1)
    return TraceCondition(order, coeff, data)


def slope_at(comp: BoundaryComponent, s: Fraction | float) -> Fraction:
    """Slope parameter chi at boundary parameter s (exact Fraction)."""
    sf = Fraction(s) if not isinstance(s, float) else Fraction(s)
    if comp.curve == "point":
        return Fraction(0)
    if comp.curve == "circle":
        # Chart x'2 = sqrt(1 - x'1^2) - x2 near the top of the unit
        # circle; the xin coefficient of the first-order block carries
        # 2*s/sqrt(1-s^2), vanishing exactly at s = 0.
        if sf == 0:
            return Fraction(0)
        val = 2.0 * float(sf) / math.sqrt(1.0 - float(sf) ** 2)
        return Fraction(val)
    return eval_scalar(comp.chi, {"s": sf})


def elaborate_at_sample(spec: OperatorSpec, comp_id: str,
                        s: Fraction | float) -> SymbolPoly:
    """Symbol at one boundary sample, slope substituted exactly."""
    comp = spec.component(comp_id)
    expr = comp.expr if comp.expr is not None else spec.expr
    env = {k: CRat(v) for k, v in spec.param_map().items()}
    env["chi"] = CRat(slope_at(comp, s))
    poly = elaborate(expr, spec.nvars, env)
    if poly.xin_degree() > spec.order:
        raise ParseError(f"boundary.{comp_id}: symbol has xin degree "
                         f"{poly.xin_degree()} > declared order {spec.order}")
    if not poly.is_zero():
        poly.leading_eps_exponent()   # must be well defined
    return poly


# ----------------------------------------------------------------------
# canonical printer
# ----------------------------------------------------------------------

def _frac_str(q: Fraction) -> str:
    return str(q)


def print_expr(e: Expr, parent: int = 0) -> str:
    """Canonical rendering; parse(print_expr(e)) reproduces e.

    Precedence levels: 0 sum, 1 product, 2 unary, 3 power/atom.
    """
    if isinstance(e, Num):
        if e.value.denominator == 1:
            txt, lvl = str(e.value), 3 if e.value >= 0 else 2
        elif Fraction(float(e.value)) == e.value:
            # dyadic fractions come from float literals; repr round-trips
            txt, lvl = repr(float(e.value)), 3
        else:
            txt, lvl = _frac_str(e.value), 1
    elif isinstance(e, Name):
        txt, lvl = e.ident, 3
    elif isinstance(e, Call):
        txt, lvl = f"{e.func}({print_expr(e.arg)})", 3
    elif isinstance(e, Neg):
        txt, lvl = "-" + print_expr(e.arg, 2), 2
    elif isinstance(e, Pow):
        q = e.exponent
        if q.denominator == 1 and q >= 0:
            suffix = str(q)
        else:
            suffix = f"({q})"
        txt, lvl = print_expr(e.base, 3) + "^" + suffix, 3
    elif isinstance(e, Bin):
        if e.op in "+-":
            lvl = 0
            txt = (print_expr(e.lhs, 0) + f" {e.op} "
                   + print_expr(e.rhs, 1 if e.op == "-" else 0))
        else:
            lvl = 1
            txt = (print_expr(e.lhs, 1) + e.op
                   + print_expr(e.rhs, 2))
    else:
        raise StructuralError("unknown expression node")
    if lvl < parent:
        return "(" + txt + ")"
    return txt


def print_spec(spec: OperatorSpec) -> str:
    """Sectioned canonical form; parse_spec(print_spec(s)) == s."""
    out = ["[operator]", f"name = {spec.name}", f"nvars = {spec.nvars}",
           f"order = {spec.order}"]
    if spec.expr is not None:
        out.append(f"expr = {print_expr(spec.expr)}")
    if spec.params:
        out.append("")
        out.append("[params]")
        for k, v in spec.params:
            out.append(f"{k} = {_frac_str(v)}")
    for comp in spec.components:
        out.append("")
        out.append(f"[boundary.{comp.id}]")
        out.append(f"curve = {comp.curve}")
        if comp.chi is not None:
            out.append(f"chi = {print_expr(comp.chi)}")
        out.append("samples = " + ", ".join(_frac_str(s)
                                            for s in comp.samples))
        if comp.expr is not None:
            out.append(f"expr = {print_expr(comp.expr)}")
    for cid, conds in spec.bcs:
        out.append("")
        out.append(f"[bc.{cid}]")
        for c in conds:
            out.append(f"condition = order {c.order}, "
                       f"coeff {print_expr(c.coeff)}, g {print_expr(c.data)}")
    return "\n".join(out) + "\n"
