"""Fixed-point arithmetic circuits over bit-engine handles.

Numbers are two's-complement words of ``total_bits`` bits, LSB first,
carrying an implicit scale of ``2**frac_bits``; both operands of any
binary operation must share one format.  Addition is a ripple of full
adders (9F - 5 NANDs at width F: a shared-NAND half adder starts the
chain and the top stage skips its carry).  Subtraction inverts the
second operand and feeds a carry-in of 1.  Multiplication sign-extends
to twice the width, reduces partial products through carry-save adder
layers, and finishes with one ripple add; the fixed-point variant keeps
bits [f, f + F) of the double-width product, an implicit division by
the scale.  High-order bits beyond the kept window are never computed.

Multiplying by a plaintext constant uses the same construction with the
constant's bits baked in, so zero bits cost nothing and the result is
bit-identical to multiplying by an encryption of the same constant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RangeError, UsageError
from .gates import and_, not_, xor_


@dataclass(frozen=True)
class FixedFormat:
    """Word width and fractional split of a fixed-point format."""

    total_bits: int
    frac_bits: int

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    def __post_init__(self):
        if not 0 < self.frac_bits < self.total_bits:
            raise UsageError(
                f"need 0 < frac_bits < total_bits, got {self.frac_bits}/{self.total_bits}")


@dataclass(frozen=True)
class FixedWord:
    """LSB-first tuple of bit handles plus its format."""

    bits: tuple
    fmt: FixedFormat

    def __post_init__(self):
        if len(self.bits) != self.fmt.total_bits:
            raise UsageError(
                f"word has {len(self.bits)} bits, format wants {self.fmt.total_bits}")

    @property
    def engine(self):
        return self.bits[0].engine


# -- plaintext codec -----------------------------------------------------

def encode_int(x: float, fmt: FixedFormat) -> int:
    """Nearest fixed-point integer round(x * 2^f); raises when out of range."""
    ix = round(x * fmt.scale)
    half = 1 << (fmt.total_bits - 1)
    if not -half <= ix < half:
        raise RangeError(f"{x} does not fit {fmt.total_bits}.{fmt.frac_bits} "
                         f"fixed point (integer {ix})")
    return ix


def encode(x: float, fmt: FixedFormat) -> list[int]:
    """Plaintext bit vector (LSB first, two's complement) for a real x."""
    return int_to_bits(encode_int(x, fmt), fmt.total_bits)


def decode(bits, fmt: FixedFormat) -> float:
    """Real value of a plaintext bit vector; exact inverse of encode."""
    return bits_to_int(bits, signed=True) / fmt.scale


def int_to_bits(v: int, width: int) -> list[int]:
    pattern = v % (1 << width)
    return [(pattern >> i) & 1 for i in range(width)]


def bits_to_int(bits, signed: bool = True) -> int:
    raw = 0
    for i, b in enumerate(bits):
        raw |= (b & 1) << i
    if signed and bits and (raw >> (len(bits) - 1)) & 1:
        raw -= 1 << len(bits)
    return raw


# -- word construction and readout ---------------------------------------

def input_word(engine, values, fmt: FixedFormat) -> FixedWord:
    """Encode one value per engine lane into a word of variable wires."""
    if isinstance(values, (int, float)):
        values = [values] * engine.batch_size
    if len(values) != engine.batch_size:
        raise UsageError(f"got {len(values)} values for {engine.batch_size} lanes")
    ints = [encode_int(v, fmt) % (1 << fmt.total_bits) for v in values]
    handles = []
    for bit in range(fmt.total_bits):
        lanes = 0
        for lane, iv in enumerate(ints):
            lanes |= ((iv >> bit) & 1) << lane
        handles.append(engine.input_bit(lanes))
    return FixedWord(tuple(handles), fmt)


def constant_word(engine, x: float, fmt: FixedFormat) -> FixedWord:
    """Word of public constant bits (foldable, costs no gates downstream)."""
    return FixedWord(tuple(engine.constant(b) for b in encode(x, fmt)), fmt)


def read_word(engine, word: FixedWord) -> list[float]:
    """Decoded value of a word in every lane (FHE readout needs the secret key)."""
    masks = [engine.read_back(h) for h in word.bits]
    out = []
    for lane in range(engine.batch_size):
        out.append(decode([(m >> lane) & 1 for m in masks], word.fmt))
    return out


# -- adders ---------------------------------------------------------------

def half_adder(a, b):
    """sum = a XOR b, carry = a AND b (6 NANDs)."""
    return xor_(a, b), and_(a, b)


def full_adder(a, b, cin):
    """sum = a XOR b XOR cin, carry = majority; 9 NANDs.

    Two half adders plus the OR of their carries, sharing the carry NANDs:
    the OR collapses to one gate on the available complements.
    """
    eng = a.engine
    n1 = eng.nand(a, b)
    s1 = eng.nand(eng.nand(a, n1), eng.nand(b, n1))
    n4 = eng.nand(s1, cin)
    total = eng.nand(eng.nand(s1, n4), eng.nand(cin, n4))
    return total, eng.nand(n4, n1)


def _ha_shared(a, b):
    """Half adder reusing its NAND between the XOR and the carry (5 gates)."""
    eng = a.engine
    n1 = eng.nand(a, b)
    s = eng.nand(eng.nand(a, n1), eng.nand(b, n1))
    return s, eng.nand(n1, n1)


def _ripple(abits, bbits, cin=None) -> list:
    """Width-preserving ripple add; the carry out of the top bit is dropped."""
    width = len(abits)
    out = []
    carry = cin
    for i in range(width):
        a, b = abits[i], bbits[i]
        if i == width - 1:
            s = xor_(a, b)
            out.append(xor_(s, carry) if carry is not None else s)
        elif carry is None:
            s, carry = _ha_shared(a, b)
            out.append(s)
        else:
            s, carry = full_adder(a, b, carry)
            out.append(s)
    return out


def _check_formats(x: FixedWord, y: FixedWord):
    if x.fmt != y.fmt:
        raise UsageError(f"format mismatch: {x.fmt} vs {y.fmt}")


def add(x: FixedWord, y: FixedWord) -> FixedWord:
    """Two's-complement sum, wrapping on overflow; 9F - 5 NANDs."""
    _check_formats(x, y)
    return FixedWord(tuple(_ripple(x.bits, y.bits)), x.fmt)


def sub(x: FixedWord, y: FixedWord) -> FixedWord:
    """x - y by inverting y and rippling with carry-in 1; 10F - 3 NANDs."""
    _check_formats(x, y)
    inverted = [not_(b) for b in y.bits]
    one = x.engine.constant(1)
    return FixedWord(tuple(_ripple(x.bits, inverted, cin=one)), x.fmt)


# -- multipliers -----------------------------------------------------------

def _reduce_columns(cols):
    """Carry-save 3->2 layers until every column holds at most two bits."""
    while any(len(col) > 2 for col in cols):
        nxt = [[] for _ in cols]
        for ci, col in enumerate(cols):
            i = 0
            while len(col) - i >= 3:
                s, cy = full_adder(col[i], col[i + 1], col[i + 2])
                i += 3
                nxt[ci].append(s)
                if ci + 1 < len(cols):
                    nxt[ci + 1].append(cy)
            if len(col) - i == 2:
                s, cy = _ha_shared(col[i], col[i + 1])
                i += 2
                nxt[ci].append(s)
                if ci + 1 < len(cols):
                    nxt[ci + 1].append(cy)
            nxt[ci].extend(col[i:])
        cols = nxt
    return cols


def _final_add(engine, cols) -> list:
    zero = engine.constant(0)
    arow = [col[0] if len(col) > 0 else zero for col in cols]
    brow = [col[1] if len(col) > 1 else zero for col in cols]
    return _ripple(arow, brow)


def _sign_extend(bits, width):
    bits = list(bits)
    return bits + [bits[-1]] * (width - len(bits))


def _product_bits(x: FixedWord, y: FixedWord, hi: int) -> list:
    """Bits 0..hi-1 of the sign-extended product of two words."""
    xb = _sign_extend(x.bits, hi)
    yb = _sign_extend(y.bits, hi)
    cols = [[] for _ in range(hi)]
    for i in range(hi):
        for j in range(hi - i):
            cols[i + j].append(and_(xb[i], yb[j]))
    return _final_add(x.engine, _reduce_columns(cols))


def _product_bits_const(x: FixedWord, c_int: int, hi: int) -> list:
    """Like _product_bits with one operand's bits known; zero bits vanish."""
    xb = _sign_extend(x.bits, hi)
    pattern = c_int % (1 << hi)  # two's complement, sign bits included
    cols = [[] for _ in range(hi)]
    for j in range(hi):
        if (pattern >> j) & 1:
            for i in range(hi - j):
                cols[i + j].append(xb[i])
    return _final_add(x.engine, _reduce_columns(cols))


def mul_integer(x: FixedWord, y: FixedWord) -> FixedWord:
    """Integer product of the raw words, high bits dropped (wraps mod 2^F)."""
    _check_formats(x, y)
    return FixedWord(tuple(_product_bits(x, y, x.fmt.total_bits)), x.fmt)


def mul_fixed(x: FixedWord, y: FixedWord) -> FixedWord:
    """Fixed-point product: bits [f, f+F) of the extended product.

    The window drop is a truncation (floor toward minus infinity), so the
    result value is floor(x * y * 2^f) / 2^f up to the operands' own
    quantization.
    """
    _check_formats(x, y)
    fmt = x.fmt
    bits = _product_bits(x, y, fmt.frac_bits + fmt.total_bits)
    return FixedWord(tuple(bits[fmt.frac_bits:]), fmt)


def mul_const(x: FixedWord, c: float) -> FixedWord:
    """Fixed-point product with a plaintext constant.

    Bit-identical to ``mul_fixed(x, <encryption of c>)``; the constant's
    binary expansion is public circuit structure (partially traceable by
    an observer of the evaluation, which is the accepted cost/secrecy
    trade of constant multiplication).
    """
    fmt = x.fmt
    bits = _product_bits_const(x, encode_int(c, fmt), fmt.frac_bits + fmt.total_bits)
    return FixedWord(tuple(bits[fmt.frac_bits:]), fmt)
