"""Line-oriented text format for structure constants.

Sections start with a keyword header (``space``, ``settings``, ``brackets``,
``action``, ``tensor``, ``morphism``); every following line is an entry of
that section.  Scalars are always written ``p/q`` in lowest terms with a
positive denominator, so a file can never smuggle in a float.  Word keys of
symmetric brackets must be written in canonical basis order; the parser
rejects out-of-order keys rather than silently normalising them.

Comments run from ``#`` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .action import ActionFamily, BiMultiMap
from .graded import GradedSpace, Word
from .homotopy import HomotopyStructure
from .multimap import PLAIN, SYMMETRIC, MultiMap, Vector
from .report import InputError, frac_str

KEYWORDS = {"space", "settings", "brackets", "action", "tensor", "morphism"}
SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.+']*\Z")
SCALAR_RE = re.compile(r"-?\d+/\d+\Z")

__all__ = ["LifError", "Settings", "StructureFile", "parse", "parse_path", "serialize"]


class LifError(InputError):
    """Malformed structure file, with a line diagnostic."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Settings:
    bound: int = 4
    max_arity: int = 3
    seed: int = 0


@dataclass
class StructureFile:
    spaces: dict[str, GradedSpace] = field(default_factory=dict)
    settings: Settings = field(default_factory=Settings)
    bracket_sections: dict[str, tuple[str, dict[int, MultiMap]]] = field(
        default_factory=dict
    )
    action_section: tuple[str, str, dict[tuple[int, int], BiMultiMap]] | None = None
    tensor_section: tuple[str, str, dict[int, MultiMap]] | None = None
    morphism_section: tuple[str, str, dict[int, MultiMap]] | None = None

    def space(self, name: str) -> GradedSpace:
        if name not in self.spaces:
            raise InputError(f"unknown space {name!r}")
        return self.spaces[name]

    def structure(self, name: str) -> HomotopyStructure:
        space = self.space(name)
        flavor, brackets = self.bracket_sections.get(name, (SYMMETRIC, {}))
        return HomotopyStructure(space, flavor, brackets, self.settings.max_arity)

    def action_family(self) -> ActionFamily:
        if self.action_section is None:
            raise InputError("the file has no action section")
        ename, vname, comps = self.action_section
        return ActionFamily(self.structure(ename), self.structure(vname), comps)

    def embedding_tensor(self):
        from .tensor import EmbeddingTensor

        if self.tensor_section is None:
            raise InputError("the file has no tensor section")
        vname, ename, comps = self.tensor_section
        return EmbeddingTensor(self.space(vname), self.space(ename), comps)


def _scalar(token: str, line: int) -> Fraction:
    if not SCALAR_RE.match(token):
        raise LifError(line, f"scalar {token!r} must be written p/q")
    num, den = token.split("/")
    p, q = int(num), int(den)
    if q == 0:
        raise LifError(line, f"scalar {token!r} has a zero denominator")
    if q < 0:
        raise LifError(line, f"scalar {token!r} must have a positive denominator")
    if p == 0:
        raise LifError(line, "zero coefficients are not stored")
    if gcd(abs(p), q) != 1:
        raise LifError(line, f"scalar {token!r} is not in lowest terms")
    return Fraction(p, q)


def _split_entry(text: str, line: int) -> list[str]:
    parts = [p.strip() for p in text.split(":")]
    if len(parts) != 3:
        raise LifError(line, "entries have the shape 'arity : words -> out : p/q'")
    return parts


def _arrow(body: str, line: int) -> tuple[list[str], str]:
    if "->" not in body:
        raise LifError(line, "missing '->' in entry")
    left, _, right = body.partition("->")
    out = right.strip()
    if not SYMBOL_RE.match(out):
        raise LifError(line, f"bad output symbol {out!r}")
    return left.split(), out


class _Parser:
    def __init__(self, text: str):
        self.sf = StructureFile()
        self.section: tuple | None = None
        self.raw_entries: list = []
        self.pending: dict = {
            "brackets": {},
            "action": None,
            "tensor": None,
            "morphism": None,
        }
        self.seen_settings = False
        for lineno, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].strip()
            if not content:
                continue
            tokens = content.split()
            if tokens[0] in KEYWORDS:
                self._start_section(tokens, lineno)
            else:
                self._entry(content, tokens, lineno)
        self._finish()

    # -- sections --------------------------------------------------------------

    def _start_section(self, tokens, line):
        self._close_space()
        kind = tokens[0]
        args = tokens[1:]
        if kind == "space":
            if len(args) != 1 or not SYMBOL_RE.match(args[0]):
                raise LifError(line, "space header is 'space <name>'")
            if args[0] in self.sf.spaces:
                raise LifError(line, f"space {args[0]!r} declared twice")
            self.section = ("space", args[0], [])
        elif kind == "settings":
            if args:
                raise LifError(line, "settings header takes no arguments")
            if self.seen_settings:
                raise LifError(line, "settings declared twice")
            self.seen_settings = True
            self.section = ("settings",)
        elif kind == "brackets":
            if len(args) != 2 or args[1] not in (SYMMETRIC, PLAIN):
                raise LifError(
                    line, "brackets header is 'brackets <space> <symmetric|plain>'"
                )
            name = args[0]
            if name not in self.sf.spaces:
                raise LifError(line, f"brackets for undeclared space {name!r}")
            if name in self.pending["brackets"]:
                raise LifError(line, f"brackets for {name!r} declared twice")
            self.pending["brackets"][name] = (args[1], {}, line)
            self.section = ("brackets", name, args[1])
        else:
            if len(args) != 2:
                raise LifError(line, f"{kind} header is '{kind} <source> <target>'")
            for name in args:
                if name not in self.sf.spaces:
                    raise LifError(line, f"{kind} uses undeclared space {name!r}")
            if self.pending[kind] is not None:
                raise LifError(line, f"{kind} declared twice")
            self.pending[kind] = (args[0], args[1], {}, line)
            self.section = (kind,)

    def _close_space(self):
        # space sections are materialised as soon as another section begins
        if self.section and self.section[0] == "space" and len(self.section) == 3:
            name, basis = self.section[1], self.section[2]
            if not basis:
                raise InputError(f"space {name!r} has an empty basis")
            self.sf.spaces[name] = GradedSpace(name, basis)
            self.section = None

    # -- entries ---------------------------------------------------------------

    def _entry(self, content, tokens, line):
        if self.section is None:
            raise LifError(line, f"entry outside any section: {content!r}")
        kind = self.section[0]
        if kind == "space":
            if len(tokens) != 2 or not SYMBOL_RE.match(tokens[0]):
                raise LifError(line, "space entries are '<symbol> <degree>'")
            try:
                degree = int(tokens[1])
            except ValueError:
                raise LifError(line, f"bad degree {tokens[1]!r}") from None
            if any(sym == tokens[0] for sym, _ in self.section[2]):
                raise LifError(line, f"duplicate symbol {tokens[0]!r}")
            self.section[2].append((tokens[0], degree))
        elif kind == "settings":
            if len(tokens) != 2 or tokens[0] not in ("bound", "max_arity", "seed"):
                raise LifError(line, "settings entries are bound/max_arity/seed <int>")
            try:
                value = int(tokens[1])
            except ValueError:
                raise LifError(line, f"bad integer {tokens[1]!r}") from None
            if tokens[0] != "seed" and value < 1:
                raise LifError(line, f"{tokens[0]} must be positive")
            setattr(self.sf.settings, tokens[0], value)
        elif kind == "brackets":
            self._bracket_entry(content, line)
        elif kind == "action":
            self._action_entry(content, line)
        elif kind in ("tensor", "morphism"):
            self._component_entry(kind, content, line)

    def _bracket_entry(self, content, line):
        _, name, flavor = self.section
        space = self.sf.spaces[name]
        head, body, scalar = _split_entry(content, line)
        try:
            arity = int(head)
        except ValueError:
            raise LifError(line, f"bad arity {head!r}") from None
        if arity < 1:
            raise LifError(line, "arity must be positive")
        syms, out = _arrow(body, line)
        if len(syms) != arity:
            raise LifError(line, f"{len(syms)} inputs for arity {arity}")
        word = tuple(self._index(space, s, line) for s in syms)
        out_i = self._index(space, out, line)
        coeff = _scalar(scalar, line)
        if flavor == SYMMETRIC:
            norm, sign = space.normalize(word)
            if sign == 0:
                raise LifError(line, "key vanishes in the symmetric algebra")
            if norm != word:
                raise LifError(line, "symmetric keys must be in canonical order")
        if space.degrees[out_i] != 1 + space.word_degree(word):
            raise LifError(line, "entry breaks degree homogeneity of a +1 bracket")
        table = self.pending["brackets"][name][1].setdefault(arity, {})
        if (word, out_i) in table:
            raise LifError(line, "duplicate constant")
        table[(word, out_i)] = coeff

    def _action_entry(self, content, line):
        if self.pending["action"] is None:
            raise LifError(line, "action entry outside an action section")
        ename, vname, table, _ = self.pending["action"]
        espace, vspace = self.sf.spaces[ename], self.sf.spaces[vname]
        head, body, scalar = _split_entry(content, line)
        arities = head.split()
        if len(arities) != 2:
            raise LifError(line, "action entries start with '<k> <n> :'")
        try:
            k, n = int(arities[0]), int(arities[1])
        except ValueError:
            raise LifError(line, f"bad arities {head!r}") from None
        if ";" not in body:
            raise LifError(line, "action entries separate blocks with ';'")
        eside, _, rest = body.partition(";")
        syms_v, out = _arrow(rest, line)
        syms_e = eside.split()
        if len(syms_e) != k or len(syms_v) != n:
            raise LifError(line, "block lengths do not match the stated arities")
        eword = tuple(self._index(espace, s, line) for s in syms_e)
        vword = tuple(self._index(vspace, s, line) for s in syms_v)
        out_i = self._index(vspace, out, line)
        coeff = _scalar(scalar, line)
        for word, space, label in ((eword, espace, "acting"), (vword, vspace, "target")):
            norm, sign = space.normalize(word)
            if sign == 0:
                raise LifError(line, f"{label} key vanishes in the symmetric algebra")
            if norm != word:
                raise LifError(line, f"{label} key must be in canonical order")
        deg = 1 + espace.word_degree(eword) + vspace.word_degree(vword)
        if vspace.degrees[out_i] != deg:
            raise LifError(line, "entry breaks degree homogeneity of a +1 component")
        key = ((k, n), eword, vword, out_i)
        if key in table:
            raise LifError(line, "duplicate constant")
        table[key] = coeff

    def _component_entry(self, kind, content, line):
        src_name, dst_name, table, _ = self.pending[kind]
        src, dst = self.sf.spaces[src_name], self.sf.spaces[dst_name]
        head, body, scalar = _split_entry(content, line)
        try:
            arity = int(head)
        except ValueError:
            raise LifError(line, f"bad arity {head!r}") from None
        syms, out = _arrow(body, line)
        if len(syms) != arity:
            raise LifError(line, f"{len(syms)} inputs for arity {arity}")
        word = tuple(self._index(src, s, line) for s in syms)
        out_i = self._index(dst, out, line)
        coeff = _scalar(scalar, line)
        if dst.degrees[out_i] != src.word_degree(word):
            raise LifError(line, "entry breaks degree homogeneity of a degree-0 map")
        if (arity, word, out_i) in table:
            raise LifError(line, "duplicate constant")
        table[(arity, word, out_i)] = coeff

    def _index(self, space, symbol, line):
        try:
            return space.index(symbol)
        except KeyError:
            raise LifError(line, f"unknown symbol {symbol!r} in space {space.name!r}") from None

    # -- assembly ----------------------------------------------------------------

    def _finish(self):
        self._close_space()
        sf = self.sf
        for name, (flavor, tables, _line) in self.pending["brackets"].items():
            space = sf.spaces[name]
            brackets = {}
            for arity, entries in tables.items():
                rows: dict[Word, Vector] = {}
                for (word, out), c in entries.items():
                    rows.setdefault(word, {})[out] = c
                brackets[arity] = MultiMap(space, space, arity, 1, flavor, rows)
            sf.bracket_sections[name] = (flavor, brackets)
        if self.pending["action"] is not None:
            ename, vname, table, _line = self.pending["action"]
            espace, vspace = sf.spaces[ename], sf.spaces[vname]
            grouped: dict[tuple[int, int], dict] = {}
            for ((k, n), ew, vw, out), c in table.items():
                grouped.setdefault((k, n), {}).setdefault((ew, vw), {})[out] = c
            comps = {
                kn: BiMultiMap(espace, vspace, kn[0], kn[1], 1, rows)
                for kn, rows in grouped.items()
            }
            sf.action_section = (ename, vname, comps)
        for kind in ("tensor", "morphism"):
            if self.pending[kind] is None:
                continue
            src_name, dst_name, table, _line = self.pending[kind]
            src, dst = sf.spaces[src_name], sf.spaces[dst_name]
            grouped = {}
            for (arity, word, out), c in table.items():
                grouped.setdefault(arity, {}).setdefault(word, {})[out] = c
            comps = {
                arity: MultiMap(src, dst, arity, 0, PLAIN, rows)
                for arity, rows in grouped.items()
            }
            if kind == "tensor":
                sf.tensor_section = (src_name, dst_name, comps)
            else:
                sf.morphism_section = (src_name, dst_name, comps)


def parse(text: str) -> StructureFile:
    return _Parser(text).sf


def parse_path(path) -> StructureFile:
    with open(path, "r", encoding="utf-8") as handle:
        return parse(handle.read())


# ---------------------------------------------------------------------------
# serialization


def _emit_multimap(lines, f: MultiMap) -> None:
    src, dst = f.source, f.target
    for word, out, c in f.entries():
        syms = " ".join(src.symbols[i] for i in word)
        lines.append(f"  {f.arity} : {syms} -> {dst.symbols[out]} : {frac_str(c)}")


def serialize(sf: StructureFile) -> str:
    """Canonical text: declaration order for spaces, sorted constants."""
    lines: list[str] = []
    for name, space in sf.spaces.items():
        lines.append(f"space {name}")
        for sym, deg in zip(space.symbols, space.degrees):
            lines.append(f"  {sym} {deg}")
        lines.append("")
    lines.append("settings")
    lines.append(f"  bound {sf.settings.bound}")
    lines.append(f"  max_arity {sf.settings.max_arity}")
    lines.append(f"  seed {sf.settings.seed}")
    lines.append("")
    for name in sf.spaces:
        if name not in sf.bracket_sections:
            continue
        flavor, brackets = sf.bracket_sections[name]
        lines.append(f"brackets {name} {flavor}")
        for arity in sorted(brackets):
            _emit_multimap(lines, brackets[arity])
        lines.append("")
    if sf.action_section is not None:
        ename, vname, comps = sf.action_section
        espace, vspace = sf.spaces[ename], sf.spaces[vname]
        lines.append(f"action {ename} {vname}")
        for (k, n) in sorted(comps):
            f = comps[(k, n)]
            for (ew, vw) in sorted(f.constants):
                vec = f.constants[(ew, vw)]
                esyms = " ".join(espace.symbols[i] for i in ew)
                vsyms = " ".join(vspace.symbols[i] for i in vw)
                for out in sorted(vec):
                    lines.append(
                        f"  {k} {n} : {esyms} ; {vsyms} -> "
                        f"{vspace.symbols[out]} : {frac_str(vec[out])}"
                    )
        lines.append("")
    for kind, section in (
        ("tensor", sf.tensor_section),
        ("morphism", sf.morphism_section),
    ):
        if section is None:
            continue
        src_name, dst_name, comps = section
        lines.append(f"{kind} {src_name} {dst_name}")
        for arity in sorted(comps):
            _emit_multimap(lines, comps[arity])
        lines.append("")
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines) + "\n"
