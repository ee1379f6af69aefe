"""Multilingual wordlists: parsing, serialization, restriction and merging.

A wordlist is a table with one row per meaning and one column per language.
Cells hold the most common word form for that meaning in that language::

    Word    Classical.Latin  Romanian
    all     omnis            tot
    ashes   cinis            cenusa

Forms are NFC-normalized, stripped and lower-cased on ingest, so edit
distances act on Unicode scalar values rather than bytes.
"""

from __future__ import annotations

import csv
import io
import unicodedata
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from .errors import (
    DuplicateLanguage,
    DuplicateMeaning,
    LanguageCollision,
    MalformedRow,
    SynonymWarning,
    UnknownLanguage,
)

DEFAULT_MISSING = "?"


@dataclass(frozen=True)
class WordList:
    """Language x meaning table of word forms.

    ``forms`` maps ``(meaning, language)`` to a single non-empty form; absent
    keys are missing data.
    """

    meanings: tuple[str, ...]
    languages: tuple[str, ...]
    forms: Mapping[tuple[str, str], str] = field(default_factory=dict)
    meaning_column: str = "meaning"

    def __post_init__(self):
        object.__setattr__(self, "meanings", tuple(self.meanings))
        object.__setattr__(self, "languages", tuple(self.languages))
        _check_unique(self.languages, DuplicateLanguage, "language")
        _check_unique(self.meanings, DuplicateMeaning, "meaning")
        known_m, known_l = set(self.meanings), set(self.languages)
        clean = {}
        for (m, lang), form in self.forms.items():
            if m not in known_m or lang not in known_l:
                raise KeyError(f"cell ({m!r}, {lang!r}) outside the table")
            if not form:
                raise ValueError(f"empty form stored at ({m!r}, {lang!r})")
            clean[(m, lang)] = form
        object.__setattr__(self, "forms", clean)

    @property
    def n_meanings(self) -> int:
        return len(self.meanings)

    def form(self, meaning: str, language: str) -> str | None:
        return self.forms.get((meaning, language))

    def column(self, language: str) -> list[str | None]:
        """Forms of one language in meaning order (None where missing)."""
        if language not in self.languages:
            raise UnknownLanguage(language)
        return [self.forms.get((m, language)) for m in self.meanings]


def _check_unique(names, exc, what):
    seen = set()
    for name in names:
        if name in seen:
            raise exc(f"duplicate {what} {name!r}")
        seen.add(name)


def normalize_form(text: str) -> str:
    return unicodedata.normalize("NFC", text.strip()).lower()


def parse_wordlist(
    source: TextIO | str,
    delimiter: str = "\t",
    missing: str = DEFAULT_MISSING,
    header: bool = True,
) -> WordList:
    """Parse a delimited wordlist table.

    Parameters
    ----------
    source : file-like or str
        The table text. The first column holds meanings, every further
        column one language.
    delimiter : str
        Field separator (tab by default).
    missing : str
        Cell content that marks a missing form. Empty cells are missing too.
    header : bool
        If False the first row is data and languages are named ``L1..Lk``.

    Returns
    -------
    WordList

    Raises
    ------
    DuplicateLanguage, DuplicateMeaning, MalformedRow
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source, delimiter=delimiter)
    rows = [(reader.line_num, row) for row in reader]
    rows = [(ln, [c.strip() for c in row]) for ln, row in rows if any(c.strip() for c in row)]

    if header:
        if not rows:
            return WordList((), ())
        _, head = rows[0]
        body = rows[1:]
        meaning_column = head[0] or "meaning"
        languages = [unicodedata.normalize("NFC", h) for h in head[1:]]
    else:
        body = rows
        meaning_column = "meaning"
        width = len(body[0][1]) if body else 1
        languages = [f"L{i}" for i in range(1, width)]
    _check_unique(languages, DuplicateLanguage, "language")

    meanings: list[str] = []
    forms: dict[tuple[str, str], str] = {}
    seen = set()
    for line, row in body:
        if len(row) != len(languages) + 1:
            raise MalformedRow(
                line, f"expected {len(languages) + 1} fields, found {len(row)}"
            )
        meaning = unicodedata.normalize("NFC", row[0])
        if meaning in seen:
            raise DuplicateMeaning(f"line {line}: duplicate meaning {meaning!r}")
        seen.add(meaning)
        meanings.append(meaning)
        for lang, cell in zip(languages, row[1:]):
            if not cell or cell == missing:
                continue
            if "," in cell:
                first = cell.split(",")[0]
                warnings.warn(
                    f"line {line}: {lang} has synonyms {cell!r}; keeping {first.strip()!r}",
                    SynonymWarning,
                    stacklevel=2,
                )
                cell = first
            form = normalize_form(cell)
            if form and form != missing:
                forms[(meaning, lang)] = form
    return WordList(tuple(meanings), tuple(languages), forms, meaning_column)


def read_wordlist(path, delimiter: str = "\t", missing: str = DEFAULT_MISSING) -> WordList:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_wordlist(fh, delimiter=delimiter, missing=missing)


def serialize_wordlist(
    wl: WordList, delimiter: str = "\t", missing: str = DEFAULT_MISSING
) -> str:
    """Write ``wl`` back out in the format accepted by :func:`parse_wordlist`."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow([wl.meaning_column, *wl.languages])
    for m in wl.meanings:
        writer.writerow([m, *(wl.forms.get((m, lang), missing) for lang in wl.languages)])
    return out.getvalue()


def restrict(wl: WordList, languages: Iterable[str]) -> WordList:
    """Keep only the given language columns (in the wordlist's own order)."""
    wanted = set(languages)
    unknown = sorted(wanted - set(wl.languages))
    if unknown:
        raise UnknownLanguage(f"unknown language(s): {', '.join(unknown)}")
    keep = tuple(lang for lang in wl.languages if lang in wanted)
    forms = {key: f for key, f in wl.forms.items() if key[1] in wanted}
    return WordList(wl.meanings, keep, forms, wl.meaning_column)


def merge(a: WordList, b: WordList) -> WordList:
    """Union of languages over the meanings both lists share.

    Meanings keep the order they have in ``a``.
    """
    clash = sorted(set(a.languages) & set(b.languages))
    if clash:
        raise LanguageCollision(f"languages present in both lists: {', '.join(clash)}")
    shared = set(b.meanings)
    meanings = tuple(m for m in a.meanings if m in shared)
    keep = set(meanings)
    forms = {k: f for k, f in a.forms.items() if k[0] in keep}
    forms.update((k, f) for k, f in b.forms.items() if k[0] in keep)
    return WordList(meanings, a.languages + b.languages, forms, a.meaning_column)
