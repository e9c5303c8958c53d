"""Identity-spec language: lexer, recursive-descent parser, pretty-printer.

A document is a sequence of items

    identity "name" {
        matrix = tildeA(4, 9/4);       # or inv2D/G/T/D(k), optionally * RAT,
        B = [0, 0, 1/2, -1/2];         #   or a row literal [[..], [..]]
        xweight = [0, 0, 1, -1];
        parity(3, 4) = 0;
        basepow = 1;
        N = 2;                         # compare only the x^N slice
        order = 30;
        rhs = P(-, 9/2, 9, 2) * invq + 2 qpow(3/4) * theta(4, 1, 0, 2n+1, 0, 0);
        lhs = theta(1, 0, 0, 1, 1, 0); # tree-vs-tree cases instead of matrix
    }

with '#' comments.  Rationals are INT or INT/INT.  Factor syntax: J(a, m),
P(sign, q_exp, modulus[, x_deg]), PF(sign, q_exp, modulus, x_deg, n),
theta(quad, lin, const, wspec, xlin, xconst) with wspec a linear polynomial
in n, qpow(r), xpow(d), invq; any factor takes an integer power ^e.
Failures never raise: parse_spec returns positioned diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cartan import RationalMatrix, matrix_2Dinv, matrix_D, matrix_G, matrix_T, tilde_A
from .identities import IdentityCase
from .nahm import NahmSpec

SCALAR_KEYS = ("k", "lambda", "a", "s", "i", "N", "C")
BUILDERS = {
    "inv2D": (matrix_2Dinv, ("int",)),
    "tildeA": (tilde_A, ("int", "rat")),
    "G": (matrix_G, ("int",)),
    "T": (matrix_T, ("int",)),
    "D": (matrix_D, ("int",)),
}


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int
    column: int
    excerpt: str

    def __str__(self):
        return f"{self.severity}: {self.message} at line {self.line}, column {self.column}\n  {self.excerpt}"


@dataclass
class IdentityDecl:
    """One parsed identity block; fields keep source order for round-trips."""

    name: str
    fields: list  # list of (key, value) pairs
    line: int = 0
    column: int = 0

    def get(self, key, default=None):
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def __eq__(self, other):
        return (
            isinstance(other, IdentityDecl)
            and self.name == other.name
            and self.fields == other.fields
        )


@dataclass
class SpecDocument:
    items: list

    def __eq__(self, other):
        return isinstance(other, SpecDocument) and self.items == other.items


@dataclass
class ParseResult:
    document: SpecDocument | None
    diagnostics: list

    @property
    def ok(self) -> bool:
        return self.document is not None and not any(
            d.severity == "error" for d in self.diagnostics
        )


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

_PUNCT = set("{}()[],;=+-*/^")


@dataclass
class _Tok:
    kind: str  # IDENT | INT | STR | PUNCT | EOF
    value: str
    line: int
    col: int


def _lex(text: str):
    toks, diags = [], []
    lines = text.splitlines() or [""]
    i, line, col = 0, 1, 1
    n = len(text)

    def excerpt(ln):
        return lines[ln - 1] if 0 < ln <= len(lines) else ""

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                diags.append(Diagnostic("error", "unterminated string", line, col, excerpt(line)))
                return toks, diags
            toks.append(_Tok("STR", text[i + 1 : j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in _PUNCT:
            toks.append(_Tok("PUNCT", c, line, col))
            i += 1
            col += 1
            continue
        diags.append(Diagnostic("error", f"unexpected character {c!r}", line, col, excerpt(line)))
        i += 1
        col += 1
    toks.append(_Tok("EOF", "", line, col))
    return toks, diags


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _ParseError(Exception):
    pass


class _Parser:
    def __init__(self, text):
        self.toks, self.diags = _lex(text)
        self.lines = text.splitlines() or [""]
        self.pos = 0

    # -- plumbing ----------------------------------------------------------

    def _excerpt(self, line):
        return self.lines[line - 1] if 0 < line <= len(self.lines) else ""

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def error(self, message, tok=None):
        tok = tok or self.peek()
        self.diags.append(
            Diagnostic("error", message, tok.line, tok.col, self._excerpt(tok.line))
        )
        raise _ParseError(message)

    def expect(self, kind, value=None, what=None):
        t = self.peek()
        if t.kind != kind or (value is not None and t.value != value):
            shown = what or (value if value is not None else kind.lower())
            got = t.value if t.value else t.kind
            self.error(f"expected {shown!r}, found {got!r}")
        return self.next()

    def accept(self, kind, value=None):
        t = self.peek()
        if t.kind == kind and (value is None or t.value == value):
            return self.next()
        return None

    def _sync_field(self):
        # recovery: skip to just past the next ';' or stop before '}'
        while True:
            t = self.peek()
            if t.kind == "EOF" or (t.kind == "PUNCT" and t.value == "}"):
                return
            self.next()
            if t.kind == "PUNCT" and t.value == ";":
                return

    # -- terminals -----------------------------------------------------------

    def parse_int(self) -> int:
        neg = bool(self.accept("PUNCT", "-"))
        t = self.expect("INT", what="integer")
        return -int(t.value) if neg else int(t.value)

    def parse_rat(self) -> Fraction:
        neg = bool(self.accept("PUNCT", "-"))
        t = self.expect("INT", what="number")
        num = int(t.value)
        den = 1
        if self.accept("PUNCT", "/"):
            dt = self.expect("INT", what="denominator")
            den = int(dt.value)
            if den == 0:
                self.error("rational literal has zero denominator", dt)
        v = Fraction(num, den)
        return -v if neg else v

    def parse_sign(self) -> int:
        t = self.peek()
        if t.kind == "PUNCT" and t.value in "+-":
            self.next()
            return 1 if t.value == "+" else -1
        self.error("expected sign '+' or '-'")

    def parse_vec(self):
        self.expect("PUNCT", "[")
        out = [self.parse_rat()]
        while self.accept("PUNCT", ","):
            out.append(self.parse_rat())
        self.expect("PUNCT", "]")
        return tuple(out)

    # -- grammar ---------------------------------------------------------------

    def parse_document(self) -> SpecDocument | None:
        items = []
        while self.peek().kind != "EOF":
            try:
                items.append(self.parse_item())
            except _ParseError:
                # skip to the next plausible item start
                while self.peek().kind != "EOF" and not (
                    self.peek().kind == "IDENT" and self.peek().value == "identity"
                ):
                    self.next()
        if any(d.severity == "error" for d in self.diags):
            return None
        return SpecDocument(items)

    def parse_item(self) -> IdentityDecl:
        kw = self.expect("IDENT", "identity")
        name = self.expect("STR", what="identity name string").value
        self.expect("PUNCT", "{")
        fields = []
        while not self.accept("PUNCT", "}"):
            if self.peek().kind == "EOF":
                self.error("unterminated identity block (missing '}')")
            try:
                fields.append(self.parse_field())
            except _ParseError:
                self._sync_field()
        return IdentityDecl(name, fields, kw.line, kw.col)

    def parse_field(self):
        t = self.expect("IDENT", what="field name")
        key = t.value
        if key == "parity":
            self.expect("PUNCT", "(")
            i = self.parse_int()
            self.expect("PUNCT", ",")
            j = self.parse_int()
            self.expect("PUNCT", ")")
            self.expect("PUNCT", "=")
            r = self.parse_int()
            self.expect("PUNCT", ";")
            return ("parity", (i, j, r))
        self.expect("PUNCT", "=")
        if key in SCALAR_KEYS:
            v = self.parse_rat()
        elif key == "matrix":
            v = self.parse_matexpr()
        elif key in ("B", "xweight"):
            v = self.parse_vec()
        elif key in ("basepow", "order"):
            v = self.parse_int()
        elif key in ("rhs", "lhs"):
            v = self.parse_rhsexpr()
        else:
            self.error(f"unknown field {key!r}", t)
        self.expect("PUNCT", ";")
        return (key, v)

    def parse_matexpr(self):
        t = self.peek()
        if t.kind == "IDENT":
            name = self.next().value
            if name not in BUILDERS:
                self.error(f"unknown matrix builder {name!r}", t)
            _, argkinds = BUILDERS[name]
            self.expect("PUNCT", "(")
            args = []
            for idx, kind in enumerate(argkinds):
                if idx:
                    self.expect("PUNCT", ",")
                args.append(self.parse_int() if kind == "int" else self.parse_rat())
            if self.peek().kind == "PUNCT" and self.peek().value == ",":
                self.error(f"builder {name!r} takes {len(argkinds)} argument(s)")
            self.expect("PUNCT", ")")
            scale = Fraction(1)
            if self.accept("PUNCT", "*"):
                scale = self.parse_rat()
            return ("builder", name, tuple(args), scale)
        if t.kind == "PUNCT" and t.value == "[":
            self.expect("PUNCT", "[")
            rows = [self.parse_vec()]
            while self.accept("PUNCT", ","):
                rows.append(self.parse_vec())
            self.expect("PUNCT", "]")
            if any(len(r) != len(rows) for r in rows):
                self.error("matrix literal must be square", t)
            return ("literal", tuple(rows))
        self.error("expected a matrix builder or row literal", t)

    def parse_rhsexpr(self):
        terms = [self.parse_term(1)]
        while True:
            if self.accept("PUNCT", "+"):
                terms.append(self.parse_term(1))
            elif self.accept("PUNCT", "-"):
                terms.append(self.parse_term(-1))
            else:
                return tuple(terms)

    def parse_term(self, outer_sign: int):
        coeff = Fraction(outer_sign)
        t = self.peek()
        if t.kind == "INT" or (t.kind == "PUNCT" and t.value == "-"):
            coeff *= self.parse_rat()
            if not (self.accept("PUNCT", "*") or self._at_factor()):
                return (coeff, ())
        factors = [self.parse_factor()]
        while self.accept("PUNCT", "*"):
            factors.append(self.parse_factor())
        return (coeff, tuple(factors))

    _FACTORS = ("J", "P", "PF", "theta", "qpow", "xpow", "invq")

    def _at_factor(self) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and t.value in self._FACTORS

    def parse_factor(self):
        t = self.expect("IDENT", what="factor")
        name = t.value
        if name == "invq":
            return ("invq",)
        if name not in self._FACTORS:
            self.error(f"unknown factor {name!r}", t)
        self.expect("PUNCT", "(")
        if name == "J":
            a = self.parse_int()
            self.expect("PUNCT", ",")
            m = self.parse_int()
            self.expect("PUNCT", ")")
            return ("J", a, m, self.parse_pow())
        if name == "P":
            sign = self.parse_sign()
            self.expect("PUNCT", ",")
            q_exp = self.parse_rat()
            self.expect("PUNCT", ",")
            modulus = self.parse_rat()
            x_deg = 0
            if self.accept("PUNCT", ","):
                x_deg = self.parse_int()
            self.expect("PUNCT", ")")
            return ("P", sign, q_exp, modulus, x_deg, self.parse_pow())
        if name == "PF":
            sign = self.parse_sign()
            args = []
            for _ in range(4):
                self.expect("PUNCT", ",")
                args.append(self.parse_rat())
            self.expect("PUNCT", ")")
            q_exp, modulus, x_deg, nn = args
            return ("PF", sign, q_exp, modulus, int(x_deg), int(nn), self.parse_pow())
        if name == "theta":
            quad = self.parse_rat()
            self.expect("PUNCT", ",")
            lin = self.parse_rat()
            self.expect("PUNCT", ",")
            const = self.parse_rat()
            self.expect("PUNCT", ",")
            c0, c1 = self.parse_wspec()
            self.expect("PUNCT", ",")
            xlin = self.parse_int()
            self.expect("PUNCT", ",")
            xconst = self.parse_int()
            self.expect("PUNCT", ")")
            return ("theta", quad, lin, const, c0, c1, xlin, xconst)
        if name == "qpow":
            r = self.parse_rat()
            self.expect("PUNCT", ")")
            return ("qpow", r)
        if name == "xpow":
            d = self.parse_int()
            self.expect("PUNCT", ")")
            return ("xpow", d)
        self.error(f"unknown factor {name!r}", t)

    def parse_pow(self) -> int:
        if self.accept("PUNCT", "^"):
            return self.parse_int()
        return 1

    def parse_wspec(self):
        """Linear weight polynomial: c0, c1*n, or c1*n +/- c0."""
        if self.peek().kind == "IDENT" and self.peek().value == "n":
            self.next()
            c1 = Fraction(1)
        else:
            v = self.parse_rat()
            if self.peek().kind == "IDENT" and self.peek().value == "n":
                self.next()
                c1 = v
            else:
                return v, Fraction(0)
        if self.accept("PUNCT", "+"):
            return self.parse_rat(), c1
        t = self.peek()
        if t.kind == "PUNCT" and t.value == "-":
            # subtraction binds to the weight only inside theta's argument list
            self.next()
            return -self.parse_rat(), c1
        return Fraction(0), c1


def parse_spec(text: str) -> ParseResult:
    """Parse a document; diagnostics carry exact line/column positions."""
    parser = _Parser(text)
    try:
        doc = parser.parse_document()
    except _ParseError:
        doc = None
    if any(d.severity == "error" for d in parser.diags):
        doc = None
    return ParseResult(doc, parser.diags)


# ---------------------------------------------------------------------------
# declaration -> runnable case
# ---------------------------------------------------------------------------


def build_matrix(node) -> RationalMatrix:
    if node[0] == "literal":
        return RationalMatrix([list(r) for r in node[1]])
    _, name, args, scale = node
    M = BUILDERS[name][0](*args)
    return M if scale == 1 else M * scale


def decl_to_case(decl: IdentityDecl) -> IdentityCase:
    """Turn a parsed declaration into a runnable identity case.

    Raises InvalidSpecError (positivity, missing pieces) rather than
    producing diagnostics; by this point the text was well-formed.
    """
    from .errors import InvalidSpecError

    rhs = decl.get("rhs")
    if rhs is None:
        raise InvalidSpecError(f"identity {decl.name!r} has no rhs")
    order = decl.get("order", 30)
    lhs_tree = decl.get("lhs")
    params = {k: v for k, v in decl.fields if k in SCALAR_KEYS and k not in ("N", "C")}
    spec = None
    if lhs_tree is None:
        mat = decl.get("matrix")
        if mat is None:
            raise InvalidSpecError(f"identity {decl.name!r} needs a matrix or an lhs tree")
        A = build_matrix(mat)
        spec = NahmSpec(
            A,
            B=list(decl.get("B", [0] * A.k)),
            C=decl.get("C", 0),
            parity=decl.get("parity"),
            xweight=[int(w) for w in decl.get("xweight", [0] * A.k)],
            base_power=decl.get("basepow", 1),
        )
    n_slice = decl.get("N")
    src = None
    if lhs_tree is None and mat[0] == "builder":
        src = (mat[1], *mat[2]) if mat[3] == 1 else (mat[1], *mat[2], mat[3])
    return IdentityCase(
        decl.name,
        params,
        spec,
        list(rhs),
        Fraction(order),
        lhs_tree=list(lhs_tree) if lhs_tree is not None else None,
        xslice=int(n_slice) if n_slice is not None else None,
        matrix_src=src,
    )


# ---------------------------------------------------------------------------
# pretty-printer (canonical text; parse(pretty(doc)) == doc)
# ---------------------------------------------------------------------------


def _rat_str(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _vec_str(vec) -> str:
    return "[" + ", ".join(_rat_str(v) for v in vec) + "]"


def _wspec_str(c0, c1) -> str:
    c0, c1 = Fraction(c0), Fraction(c1)
    if c1 == 0:
        return _rat_str(c0)
    head = "n" if c1 == 1 else f"{_rat_str(c1)}n"
    if c0 == 0:
        return head
    return f"{head}+{_rat_str(c0)}" if c0 > 0 else f"{head}-{_rat_str(-c0)}"


def factor_str(f) -> str:
    kind = f[0]
    if kind == "invq":
        return "invq"
    if kind == "J":
        body = f"J({f[1]}, {f[2]})"
        return body if f[3] == 1 else f"{body}^{f[3]}"
    if kind == "P":
        _, sign, q_exp, modulus, x_deg, e = f
        args = f"{'+' if sign > 0 else '-'}, {_rat_str(q_exp)}, {_rat_str(modulus)}"
        if x_deg:
            args += f", {x_deg}"
        body = f"P({args})"
        return body if e == 1 else f"{body}^{e}"
    if kind == "PF":
        _, sign, q_exp, modulus, x_deg, n, e = f
        body = f"PF({'+' if sign > 0 else '-'}, {_rat_str(q_exp)}, {_rat_str(modulus)}, {x_deg}, {n})"
        return body if e == 1 else f"{body}^{e}"
    if kind == "theta":
        _, quad, lin, const, c0, c1, xlin, xconst = f
        return (
            f"theta({_rat_str(quad)}, {_rat_str(lin)}, {_rat_str(const)}, "
            f"{_wspec_str(c0, c1)}, {xlin}, {xconst})"
        )
    if kind == "qpow":
        return f"qpow({_rat_str(f[1])})"
    if kind == "xpow":
        return f"xpow({f[1]})"
    raise ValueError(f"unknown factor {f!r}")


def tree_str(tree) -> str:
    parts = []
    for idx, (coeff, factors) in enumerate(tree):
        coeff = Fraction(coeff)
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = " * ".join(factor_str(f) for f in factors)
        if not factors:
            piece = _rat_str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{_rat_str(mag)} {body}"
        if idx == 0:
            parts.append(piece if coeff >= 0 else f"-{piece}")
        else:
            parts.append(f"{sign} {piece}")
    return " ".join(parts) if parts else "0"


def _normalize_tree(tree):
    return tuple((Fraction(c), tuple(tuple(f) for f in fs)) for c, fs in tree)


def decl_str(decl: IdentityDecl) -> str:
    lines = [f'identity "{decl.name}" {{']
    for key, value in decl.fields:
        if key == "parity":
            i, j, r = value
            lines.append(f"    parity({i}, {j}) = {r};")
        elif key in SCALAR_KEYS:
            lines.append(f"    {key} = {_rat_str(value)};")
        elif key == "matrix":
            if value[0] == "literal":
                body = "[" + ", ".join(_vec_str(r) for r in value[1]) + "]"
            else:
                _, name, args, scale = value
                body = f"{name}(" + ", ".join(_rat_str(a) for a in args) + ")"
                if scale != 1:
                    body += f" * {_rat_str(scale)}"
            lines.append(f"    matrix = {body};")
        elif key in ("B", "xweight"):
            lines.append(f"    {key} = {_vec_str(value)};")
        elif key in ("basepow", "order"):
            lines.append(f"    {key} = {value};")
        elif key in ("rhs", "lhs"):
            lines.append(f"    {key} = {tree_str(value)};")
        else:
            raise ValueError(f"unknown field {key!r}")
    lines.append("}")
    return "\n".join(lines)


def document_str(doc: SpecDocument) -> str:
    return "\n\n".join(decl_str(d) for d in doc.items) + "\n"


def case_to_decl(case: IdentityCase, order=None) -> IdentityDecl:
    """Render a runnable case back into a declaration (builders preferred)."""
    fields = []
    if case.lhs_tree is None:
        spec = case.spec
        if case.matrix_src is not None:
            name = case.matrix_src[0]
            nargs = len(BUILDERS[name][1])
            args = case.matrix_src[1 : 1 + nargs]
            rest = case.matrix_src[1 + nargs :]
            scale = rest[0] if rest else Fraction(1)
            fields.append(("matrix", ("builder", name, tuple(args), Fraction(scale))))
        else:
            fields.append(("matrix", ("literal", tuple(tuple(r) for r in spec.A.rows))))
        if any(spec.B):
            fields.append(("B", tuple(spec.B)))
        if any(spec.xweight):
            fields.append(("xweight", tuple(Fraction(w) for w in spec.xweight)))
        if spec.parity is not None:
            fields.append(("parity", spec.parity))
        if spec.C:
            fields.append(("C", spec.C))
        if spec.base_power != 1:
            fields.append(("basepow", spec.base_power))
    else:
        fields.append(("lhs", _normalize_tree(case.lhs_tree)))
    if case.xslice is not None:
        fields.append(("N", Fraction(case.xslice)))
    o = Fraction(order if order is not None else case.default_order)
    if o.denominator == 1:
        fields.append(("order", o.numerator))
    fields.append(("rhs", _normalize_tree(case.rhs)))
    return IdentityDecl(case.name, fields)


def case_to_dsl(case: IdentityCase, order=None) -> str:
    return decl_str(case_to_decl(case, order))
