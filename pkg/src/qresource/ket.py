"""Pure-state container plus ket-expression and JSON serialization.

Bit ordering: qubit 1 is the leftmost character inside ``|...>`` and the most
significant bit of the amplitude index, so ``|10>`` is index 2.

Ket expressions are parsed by a small recursive-descent parser::

    expr    := sum
    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/")? unary)*      # juxtaposition multiplies
    unary   := "-" unary | "+" unary | postfix
    postfix := atom "i"?
    atom    := number | "i" | ket | "sqrt" "(" sum ")" | "(" sum ")"
    ket     := "|" [01]+ ">"

Scalars and kets can be combined freely as long as the result is a sum of
kets of one qubit count, e.g. ``(|0000> + |1111>)/sqrt(2)`` or
``(1/sqrt(2))i|01> - 0.5|10>``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import EPS_NORM


class KetSyntaxError(ValueError):
    def __init__(self, message, pos=None, text=None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized pure state of ``n_qubits`` qubits.

    ``input_norm`` records the norm of the amplitudes before normalization
    (1.0 for states that were already normalized).
    """

    n_qubits: int
    amplitudes: np.ndarray
    input_norm: float = field(default=1.0, compare=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.shape[0] != 2**self.n_qubits:
            raise ValueError(
                f"{self.n_qubits} qubits need {2**self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > EPS_NORM:
            raise ValueError(f"state is not normalized (norm {norm!r}); use Ket.normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes, n_qubits=None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        if n_qubits is None:
            n_qubits = int(round(math.log2(amps.shape[0]))) if amps.shape[0] else -1
            if n_qubits < 0 or 2**n_qubits != amps.shape[0]:
                raise ValueError(f"length {amps.shape[0]} is not a power of two")
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ValueError("zero vector cannot be normalized")
        if abs(norm - 1.0) <= EPS_NORM:
            return cls(n_qubits, amps, norm)
        return cls(n_qubits, amps / norm, norm)

    @classmethod
    def basis(cls, bits):
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    @property
    def dim(self):
        return 2**self.n_qubits

    @property
    def labels(self):
        return list(range(1, self.n_qubits + 1))

    def __len__(self):
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"Ket({format_ket(self, 1e-12)!r})"


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ket>\|[01]+>)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<sqrt>sqrt)
  | (?P<imag>i)
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    # Normalize unicode ket brackets so copy-pasted "|0⟩" works.
    text = text.replace("⟩", ">").replace("〉", ">")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == "|":
                raise KetSyntaxError("malformed ket, expected |[01]+>", pos, text)
            raise KetSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------- values
# A parsed value is either a complex scalar or a dict {bitstring: coefficient}.


def _is_ket(v):
    return isinstance(v, dict)


def _scale(k, s):
    return {b: c * s for b, c in k.items()}


def _add(x, y, sign, pos):
    if _is_ket(x) != _is_ket(y):
        raise KetSyntaxError("cannot add a scalar and a ket", pos)
    if not _is_ket(x):
        return x + sign * y
    out = dict(x)
    for b, c in y.items():
        if out and len(next(iter(out))) != len(b):
            raise KetSyntaxError(
                f"inconsistent qubit counts ({len(next(iter(out)))} vs {len(b)})", pos
            )
        out[b] = out.get(b, 0) + sign * c
    return out


def _mul(x, y, pos):
    if _is_ket(x) and _is_ket(y):
        raise KetSyntaxError("cannot multiply two kets", pos)
    if _is_ket(x):
        return _scale(x, y)
    if _is_ket(y):
        return _scale(y, x)
    return x * y


def _div(x, y, pos):
    if _is_ket(y):
        raise KetSyntaxError("cannot divide by a ket", pos)
    if y == 0:
        raise KetSyntaxError("division by zero", pos)
    if _is_ket(x):
        return _scale(x, 1 / y)
    return x / y


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, val, pos = self.tok
        if val != value or kind not in ("op",):
            raise KetSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)
        return self.advance()

    def error(self, msg):
        raise KetSyntaxError(msg, self.tok[2])

    def parse(self):
        value = self.sum()
        if self.tok[0] != "end":
            self.error(f"unexpected {self.tok[1]!r}")
        return value

    def sum(self):
        value = self.product()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            _, op, pos = self.advance()
            rhs = self.product()
            value = _add(value, rhs, 1 if op == "+" else -1, pos)
        return value

    def _starts_atom(self):
        kind, val, _ = self.tok
        return kind in ("number", "imag", "ket", "sqrt") or (kind == "op" and val == "(")

    def product(self):
        value = self.unary()
        while True:
            kind, val, pos = self.tok
            if kind == "op" and val == "*":
                self.advance()
                value = _mul(value, self.unary(), pos)
            elif kind == "op" and val == "/":
                self.advance()
                value = _div(value, self.unary(), pos)
            elif self._starts_atom():
                value = _mul(value, self.unary(), pos)
            else:
                return value

    def unary(self):
        kind, val, pos = self.tok
        if kind == "op" and val in "+-":
            self.advance()
            inner = self.unary()
            return inner if val == "+" else _mul(inner, -1, pos)
        return self.postfix()

    def postfix(self):
        value = self.atom()
        if self.tok[0] == "imag":
            _, _, pos = self.advance()
            value = _mul(value, 1j, pos)
        return value

    def atom(self):
        kind, val, pos = self.tok
        if kind == "number":
            self.advance()
            return complex(float(val))
        if kind == "imag":
            self.advance()
            return 1j
        if kind == "ket":
            self.advance()
            return {val[1:-1]: 1.0 + 0j}
        if kind == "sqrt":
            self.advance()
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            if _is_ket(arg):
                raise KetSyntaxError("sqrt of a ket", pos)
            if arg.imag != 0 or arg.real < 0:
                raise KetSyntaxError("sqrt argument must be a non-negative real", pos)
            return complex(math.sqrt(arg.real))
        if kind == "op" and val == "(":
            self.advance()
            inner = self.sum()
            self.expect(")")
            return inner
        self.error(f"expected a number, ket or '(' but found {val or 'end of input'!r}")


def parse_ket(text):
    """Parse a ket expression into a normalized :class:`Ket`."""
    value = _Parser(text).parse()
    if not _is_ket(value):
        raise KetSyntaxError("expression contains no ket")
    n = len(next(iter(value)))
    amps = np.zeros(2**n, dtype=complex)
    for bits, c in value.items():
        amps[int(bits, 2)] += c
    if np.linalg.norm(amps) == 0.0:
        raise KetSyntaxError("expression evaluates to the zero vector")
    return Ket.normalized(amps, n)


# ---------------------------------------------------------------- formatting


def _fmt_real(x):
    return f"{x:.10f}"


def _coefficient(c):
    """Return (sign, body) for a coefficient; body is '' for exactly 1."""
    re_, im = c.real, c.imag
    re_s, im_s = _fmt_real(abs(re_)), _fmt_real(abs(im))
    re_zero = float(re_s) == 0.0
    im_zero = float(im_s) == 0.0
    if im_zero:
        sign = "-" if re_ < 0 else "+"
        return sign, "" if re_s == "1.0000000000" else re_s
    if re_zero:
        sign = "-" if im < 0 else "+"
        return sign, ("" if im_s == "1.0000000000" else im_s) + "i"
    inner = f"{_fmt_real(re_)}{'-' if im < 0 else '+'}{im_s}i"
    return "+", f"({inner})"


def format_ket(state, threshold=1e-12):
    """Render a state as a ket expression, terms sorted by basis index."""
    n = state.n_qubits
    parts = []
    for idx, c in enumerate(state.amplitudes):
        if abs(c) <= threshold:
            continue
        sign, body = _coefficient(complex(c))
        term = f"{body}|{idx:0{n}b}>"
        if not parts:
            parts.append(term if sign == "+" else f"-{term}")
        else:
            parts.append(f" {sign} {term}")
    return "".join(parts) if parts else "0"


# ---------------------------------------------------------------- JSON


def ket_to_dict(state):
    return {
        "n_qubits": state.n_qubits,
        "amplitudes": [[float(c.real), float(c.imag)] for c in state.amplitudes],
    }


def ket_from_dict(data):
    try:
        n = int(data["n_qubits"])
        pairs = data["amplitudes"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"state JSON needs 'n_qubits' and 'amplitudes': {exc}") from None
    if len(pairs) != 2**n:
        raise ValueError(f"state JSON has {len(pairs)} amplitudes, expected {2**n}")
    amps = np.array([complex(float(re_), float(im)) for re_, im in pairs])
    return Ket.normalized(amps, n)


def dumps_ket(state, **kwargs):
    return json.dumps(ket_to_dict(state), **kwargs)


def loads_ket(text):
    return ket_from_dict(json.loads(text))


def load_state_file(path):
    """Load a ``.ket`` (expression) or ``.json`` (amplitude) state file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".ket":
        return parse_ket(text)
    if path.suffix == ".json":
        return loads_ket(text)
    raise ValueError(f"unsupported state file extension {path.suffix!r} (use .ket or .json)")
