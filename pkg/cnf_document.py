#!/usr/bin/env python3
"""
Propositional side of the translation
Atom keys, constant literals, the atom/id map and the clause document
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

from csp_errors import DecodeError

KNOWN_KINDS = ("less", "eq", "bool", "leq", "tup", "ph", "hold", "aux")

_SAFE_ARG = re.compile(r"[A-Za-z0-9_+\-*]+\Z")
_INT_ARG = re.compile(r"-?\d+\Z")
_KEY_TEXT = re.compile(r"([a-z]+)\((.*)\)\Z", re.S)


class AtomKey(NamedTuple):
    """CSP-level meaning of one propositional variable, e.g. less(x,3) for x < 3"""

    kind: str
    args: Tuple[Union[str, int], ...]

    def __str__(self) -> str:
        return f"{self.kind}({','.join(_render_arg(arg) for arg in self.args)})"

    @classmethod
    def parse(cls, text: str) -> "AtomKey":
        match = _KEY_TEXT.match(text.strip())
        if match is None:
            raise ValueError(f"not an atom key: {text!r}")
        kind, inner = match.groups()
        if kind not in KNOWN_KINDS:
            return cls(kind, (inner,))
        return cls(kind, tuple(_parse_arg(piece) for piece in _split_args(inner)))


def _render_arg(arg: Union[str, int]) -> str:
    if isinstance(arg, int):
        return str(arg)
    if _SAFE_ARG.match(arg) and not _INT_ARG.match(arg):
        return arg
    escaped = arg.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _parse_arg(text: str) -> Union[str, int]:
    if text.startswith('"'):
        return re.sub(r"\\(.)", r"\1", text[1:-1])
    if _INT_ARG.match(text):
        return int(text)
    return text


def _split_args(inner: str) -> List[str]:
    pieces: List[str] = []
    current: List[str] = []
    quoted = escaped = False
    for char in inner:
        if quoted:
            current.append(char)
            if escaped:
                escaped = False
            elif char == "\\":
                escaped = True
            elif char == '"':
                quoted = False
        elif char == '"':
            quoted = True
            current.append(char)
        elif char == ",":
            pieces.append("".join(current))
            current = []
        else:
            current.append(char)
    pieces.append("".join(current))
    return pieces


def less_key(var: str, value: int) -> AtomKey:
    return AtomKey("less", (var, value))


def eq_key(var: str, value: int) -> AtomKey:
    return AtomKey("eq", (var, value))


def bool_key(name: str) -> AtomKey:
    return AtomKey("bool", (name,))


class Constant:
    """Truth-constant literal that folds away when clauses are emitted"""

    def __init__(self, value: bool):
        self.value = value

    def __neg__(self) -> "Constant":
        return BOT if self.value else TOP

    def __repr__(self) -> str:
        return "TOP" if self.value else "BOT"


TOP = Constant(True)
BOT = Constant(False)

Lit = Union[int, Constant]
Clause = Tuple[int, ...]


class VarMap:
    """Bijection between atom keys and propositional ids, plus the order grids of integer variables"""

    def __init__(self):
        self._ids: Dict[AtomKey, int] = {}
        self._keys: List[AtomKey] = []
        self.orders: Dict[str, List[int]] = {}
        self._aux_count: Dict[str, int] = {}

    @property
    def num_vars(self) -> int:
        return len(self._keys)

    def atom(self, key: AtomKey) -> int:
        """Id of key, allocating the next id when the key is new"""
        existing = self._ids.get(key)
        if existing is not None:
            return existing
        self._keys.append(key)
        self._ids[key] = len(self._keys)
        return len(self._keys)

    def fresh(self, tag: str) -> int:
        count = self._aux_count.get(tag, 0) + 1
        self._aux_count[tag] = count
        return self.atom(AtomKey("aux", (tag, count)))

    def get(self, key: AtomKey) -> Optional[int]:
        return self._ids.get(key)

    def key_of(self, var_id: int) -> AtomKey:
        return self._keys[var_id - 1]

    def items(self) -> Iterable[Tuple[int, AtomKey]]:
        return enumerate(self._keys, 1)

    def less(self, var: str, value: int) -> Lit:
        """Literal for var < value, where value is on var's order grid"""
        grid = self.orders[var]
        if value == grid[-1]:
            return BOT
        key = less_key(var, value)
        if key not in self._ids:
            raise DecodeError(f"{value} is not an order value of {var}")
        return self._ids[key]

    def eq(self, var: str, value: int) -> int:
        return self._lookup(eq_key(var, value))

    def boolval(self, name: str) -> int:
        return self._lookup(bool_key(name))

    def _lookup(self, key: AtomKey) -> int:
        try:
            return self._ids[key]
        except KeyError:
            raise DecodeError(f"no atom {key}") from None

    @classmethod
    def from_document(cls, document: "CnfDocument") -> "VarMap":
        varmap = cls()
        for var_id in sorted(document.atoms):
            key = document.atoms[var_id]
            while varmap.num_vars < var_id - 1:
                varmap._keys.append(AtomKey("aux", ("unnamed", varmap.num_vars + 1)))
            varmap._keys.append(key)
            varmap._ids[key] = var_id
        varmap.orders = {var: list(grid) for var, grid in document.orders.items()}
        return varmap


@dataclass
class CnfDocument:
    """Clause database with the atom annotations needed to decode models"""

    num_vars: int = 0
    clauses: List[Clause] = field(default_factory=list)
    atoms: Dict[int, AtomKey] = field(default_factory=dict)
    orders: Dict[str, List[int]] = field(default_factory=dict)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)
