"""Typed λ-calculus / first-order formula ASTs and quantifier patterns.

Surface grammar (EBNF, whitespace-insensitive)::

    formula  := implies
    implies  := or [ "→" implies ]                 (right associative)
    or       := and { "∨" and }                    (left associative)
    and      := unary { "∧" unary }                (left associative)
    unary    := "¬" unary | quant | lambda | atom
    quant    := ("∀" | "∃") NAME ["."] formula     (binds maximally right)
    lambda   := "λ" NAME [":" TYPE] "." formula
    atom     := "(" formula { formula } ")" | NAME [ "(" args ")" ]
    args     := formula { "," formula }

ASCII spellings are accepted everywhere: ``forall``/``exists``/``not``/
``&``/``|``/``->``/``lam``/``lambda``/``~``/``!``.  A parenthesized group
containing several juxtaposed formulas is function application, printed
``(fn arg)``.  Identifiers starting with an uppercase letter are
predicates; lowercase identifiers are variables.

Precedence: ¬ binds tightest, then ∧, ∨, →.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class LogicError(Exception):
    pass


@dataclass
class ParseError(LogicError):
    offset: int
    expected: str
    found: str = ""

    def __str__(self):
        loc = f"byte {self.offset}"
        found = f", found {self.found!r}" if self.found else ""
        return f"syntax error at {loc}: expected {self.expected}{found}"


@dataclass
class UnboundVar(LogicError):
    name: str

    def __str__(self):
        return f"unbound variable: {self.name}"


# --- AST --------------------------------------------------------------------


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


class Quantifier(Enum):
    FORALL = "∀"
    EXISTS = "∃"


@dataclass(frozen=True)
class Quant(Formula):
    q: Quantifier
    var: str
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Lambda(Formula):
    var: str
    type_tag: str | None
    body: Formula


@dataclass(frozen=True)
class App(Formula):
    fn: Formula
    arg: Formula


# --- tokenizer --------------------------------------------------------------

_SYMBOLS = {
    "∀": "FORALL",
    "∃": "EXISTS",
    "¬": "NOT",
    "~": "NOT",
    "!": "NOT",
    "∧": "AND",
    "&": "AND",
    "∨": "OR",
    "|": "OR",
    "→": "IMPLIES",
    "λ": "LAMBDA",
    "(": "LPAREN",
    ")": "RPAREN",
    ".": "DOT",
    ",": "COMMA",
    ":": "COLON",
}

_KEYWORDS = {
    "forall": "FORALL",
    "all": "FORALL",
    "exists": "EXISTS",
    "some": "EXISTS",
    "not": "NOT",
    "and": "AND",
    "or": "OR",
    "implies": "IMPLIES",
    "lam": "LAMBDA",
    "lambda": "LAMBDA",
}


@dataclass
class _Token:
    kind: str
    text: str
    offset: int  # byte offset into the UTF-8 encoding


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    byte_offset = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            byte_offset += len(ch.encode("utf-8"))
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token("IMPLIES", "->", byte_offset))
            i += 2
            byte_offset += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(_SYMBOLS[ch], ch, byte_offset))
            i += 1
            byte_offset += len(ch.encode("utf-8"))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            kind = _KEYWORDS.get(word.lower(), "NAME")
            tokens.append(_Token(kind, word, byte_offset))
            byte_offset += len(word.encode("utf-8"))
            i = j
            continue
        raise ParseError(byte_offset, "a formula token", ch)
    tokens.append(_Token("EOF", "", byte_offset))
    return tokens


# --- parser -----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.offset, what, tok.text)
        return self.next()

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.peek().kind == "IMPLIES":
            self.next()
            return Implies(left, self.parse_formula())
        return left

    def parse_or(self) -> Formula:
        node = self.parse_and()
        while self.peek().kind == "OR":
            self.next()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Formula:
        node = self.parse_unary()
        while self.peek().kind == "AND":
            self.next()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "NOT":
            self.next()
            return Not(self.parse_unary())
        if tok.kind in ("FORALL", "EXISTS"):
            self.next()
            var = self.expect("NAME", "a bound variable name").text
            if self.peek().kind == "DOT":
                self.next()
            q = Quantifier.FORALL if tok.kind == "FORALL" else Quantifier.EXISTS
            return Quant(q, var, self.parse_formula())
        if tok.kind == "LAMBDA":
            self.next()
            var = self.expect("NAME", "a bound variable name").text
            type_tag = None
            if self.peek().kind == "COLON":
                self.next()
                type_tag = self.expect("NAME", "a type tag").text
            self.expect("DOT", "'.' after λ binder")
            return Lambda(var, type_tag, self.parse_formula())
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.next()
            node = self.parse_formula()
            # juxtaposition inside parens is application
            while self.peek().kind not in ("RPAREN", "EOF"):
                node = App(node, self.parse_formula())
            self.expect("RPAREN", "')'")
            return node
        if tok.kind == "NAME":
            self.next()
            if self.peek().kind == "LPAREN":
                self.next()
                args = [self.parse_formula()]
                while self.peek().kind == "COMMA":
                    self.next()
                    args.append(self.parse_formula())
                self.expect("RPAREN", "')' closing argument list")
                return Pred(tok.text, tuple(args))
            if tok.text[0].isupper():
                return Pred(tok.text, ())
            return Var(tok.text)
        raise ParseError(tok.offset, "a formula", tok.text)


def parse_formula(text: str, strict: bool = False) -> Formula:
    """Parse a formula from its surface syntax.

    With ``strict=True``, every variable must be bound by an enclosing
    quantifier or λ.
    """
    parser = _Parser(_tokenize(text))
    node = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(tok.offset, "end of input", tok.text)
    if strict:
        unbound = free_vars(node)
        if unbound:
            raise UnboundVar(sorted(unbound)[0])
    return node


def free_vars(f: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(f, Var):
        return set() if f.name in bound else {f.name}
    if isinstance(f, Pred):
        out: set[str] = set()
        for a in f.args:
            out |= free_vars(a, bound)
        return out
    if isinstance(f, Not):
        return free_vars(f.body, bound)
    if isinstance(f, (Quant, Lambda)):
        return free_vars(f.body, bound | {f.var})
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left, bound) | free_vars(f.right, bound)
    if isinstance(f, App):
        return free_vars(f.fn, bound) | free_vars(f.arg, bound)
    raise TypeError(f"not a formula node: {f!r}")


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


# --- pretty printer ---------------------------------------------------------

# precedence levels for parenthesization
_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 0, 1, 2, 3, 4


def pretty(f: Formula) -> str:
    """Render a formula; ``parse_formula(pretty(f)) == f``."""
    return _pp(f, 0)


def _pp(f: Formula, prec: int) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Pred):
        if not f.args:
            return f.name
        return f.name + "(" + ", ".join(_pp(a, 0) for a in f.args) + ")"
    if isinstance(f, Not):
        return _wrap("¬" + _pp(f.body, _PREC_UNARY), prec, _PREC_UNARY)
    # quantifiers and λ bind maximally right, so as an operand of any
    # connective they need parentheses
    if isinstance(f, Quant):
        body = _pp(f.body, 0)
        return _wrap(f"{f.q.value}{f.var}. {body}", prec, _PREC_IMPLIES)
    if isinstance(f, Lambda):
        tag = f":{f.type_tag}" if f.type_tag else ""
        return _wrap(f"λ{f.var}{tag}. {_pp(f.body, 0)}", prec, _PREC_IMPLIES)
    if isinstance(f, And):
        s = f"{_pp(f.left, _PREC_AND)} ∧ {_pp(f.right, _PREC_AND + 1)}"
        return _wrap(s, prec, _PREC_AND)
    if isinstance(f, Or):
        s = f"{_pp(f.left, _PREC_OR)} ∨ {_pp(f.right, _PREC_OR + 1)}"
        return _wrap(s, prec, _PREC_OR)
    if isinstance(f, Implies):
        s = f"{_pp(f.left, _PREC_IMPLIES + 1)} → {_pp(f.right, _PREC_IMPLIES)}"
        return _wrap(s, prec, _PREC_IMPLIES)
    if isinstance(f, App):
        fn = _pp(f.fn, 0)
        arg = _pp(f.arg, _PREC_ATOM)
        # a rendering that ends in a name directly followed by "(" would
        # re-parse as a predicate-argument list, so parenthesize the
        # function part
        if arg.startswith("(") and (fn[-1].isalnum() or fn[-1] in "_'"):
            fn = f"({fn})"
        return f"({fn} {arg})"
    raise TypeError(f"not a formula node: {f!r}")


def _wrap(s: str, outer: int, inner: int) -> str:
    return f"({s})" if inner < outer else s


# --- polarity events and pair patterns --------------------------------------


class PolarityKind(Enum):
    FORALL = "forall"
    EXISTS = "exists"
    NOT = "not"


@dataclass(frozen=True)
class PolarityEvent:
    event: PolarityKind
    position: int  # pre-order index over all nodes


class LocalShape(Enum):
    FORALL_PLAIN = "forall_plain"
    EXISTS_NEG = "exists_neg"      # ∃ with ¬ in scope before a deeper quantifier
    NEG_EXISTS = "neg_exists"      # ¬ immediately dominating ∃
    EXISTS_PLAIN = "exists_plain"
    NONE = "none"


class PairPattern(Enum):
    FORALL_EXISTS_NOT = "forall_exists_not"   # ∀ … ∃¬  (contradiction)
    FORALL_NOT_EXISTS = "forall_not_exists"   # ∀ … ¬∃  (contrary)
    EXISTS_EXISTS_NOT = "exists_exists_not"   # ∃ … ∃¬  (subcontradiction)


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Var,)):
        return ()
    if isinstance(f, Pred):
        return f.args
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (Quant, Lambda)):
        return (f.body,)
    if isinstance(f, (And, Or, Implies)):
        return (f.left, f.right)
    if isinstance(f, App):
        return (f.fn, f.arg)
    raise TypeError(f"not a formula node: {f!r}")


def iter_preorder(f: Formula):
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(_children(node)))


def polarity_sequence(f: Formula) -> list[PolarityEvent]:
    """Pre-order ∀/∃/¬ occurrences; all other nodes are skipped."""
    events = []
    for i, node in enumerate(iter_preorder(f)):
        if isinstance(node, Quant):
            kind = (
                PolarityKind.FORALL
                if node.q is Quantifier.FORALL
                else PolarityKind.EXISTS
            )
            events.append(PolarityEvent(kind, i))
        elif isinstance(node, Not):
            events.append(PolarityEvent(PolarityKind.NOT, i))
    return events


def _has_not_before_deeper_quant(f: Formula) -> bool:
    """True if a ¬ occurs in f without an intervening quantifier."""
    if isinstance(f, Not):
        return True
    if isinstance(f, Quant):
        return False
    return any(_has_not_before_deeper_quant(c) for c in _children(f))


def _not_dominates_exists(body: Formula) -> bool:
    """True if a ¬'s body reaches ∃ through only connectives and λ."""
    if isinstance(body, Quant):
        return body.q is Quantifier.EXISTS
    if isinstance(body, (And, Or, Implies)):
        return _not_dominates_exists(body.left) or _not_dominates_exists(body.right)
    if isinstance(body, Lambda):
        return _not_dominates_exists(body.body)
    return False


def local_shape(f: Formula) -> LocalShape:
    """Classify the quantifier/negation shape of one formula.

    NegExists takes precedence over ExistsNeg when both occur.
    """
    has_forall = False
    has_exists = False
    exists_neg = False
    neg_exists = False
    for node in iter_preorder(f):
        if isinstance(node, Quant):
            if node.q is Quantifier.FORALL:
                has_forall = True
            else:
                has_exists = True
                if _has_not_before_deeper_quant(node.body):
                    exists_neg = True
        elif isinstance(node, Not):
            if _not_dominates_exists(node.body):
                neg_exists = True
    if neg_exists:
        return LocalShape.NEG_EXISTS
    if exists_neg:
        return LocalShape.EXISTS_NEG
    if has_forall:
        return LocalShape.FORALL_PLAIN
    if has_exists:
        return LocalShape.EXISTS_PLAIN
    return LocalShape.NONE


_PATTERN_TABLE = (
    # (shape of a, shape of b, resulting pattern), most specific first
    (LocalShape.FORALL_PLAIN, LocalShape.NEG_EXISTS, PairPattern.FORALL_NOT_EXISTS),
    (LocalShape.FORALL_PLAIN, LocalShape.EXISTS_NEG, PairPattern.FORALL_EXISTS_NOT),
    (LocalShape.EXISTS_PLAIN, LocalShape.EXISTS_NEG, PairPattern.EXISTS_EXISTS_NOT),
)


def match_pair_pattern(a: Formula, b: Formula) -> PairPattern | None:
    """Match the Aristotelian pattern across an ordered formula pair.

    Asymmetric by construction; callers check both orderings.
    """
    sa, sb = local_shape(a), local_shape(b)
    for want_a, want_b, pattern in _PATTERN_TABLE:
        if sa is want_a and sb is want_b:
            return pattern
    return None
