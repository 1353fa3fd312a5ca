"""Shared fixtures: native backend build, language handles, corpus access,
and random tree generation for round-trip properties."""
from __future__ import annotations

import importlib.util
import random
from pathlib import Path

import pytest

from semascope.languages import LanguageDescriptor, builtin_registry
from semascope.syntax import ZERO_SPAN, Term

REPO = Path(__file__).resolve().parents[1]
CORPUS = Path(__file__).resolve().parent / "corpus"


def _load_native_builder():
    spec = importlib.util.spec_from_file_location("_native_build", REPO / "native" / "build.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="session", autouse=True)
def native_libs():
    """Compile the runtime and grammar libraries once per session (no-op
    when they are already fresh)."""
    builder = _load_native_builder()
    builder.build()


@pytest.fixture(scope="session")
def registry(native_libs):
    return builtin_registry()


@pytest.fixture(scope="session")
def json_lang(registry) -> LanguageDescriptor:
    return registry.language("json")


@pytest.fixture(scope="session")
def python_lang(registry) -> LanguageDescriptor:
    return registry.language("python")


def corpus_pairs() -> list[tuple[str, str, bytes, bytes]]:
    """(case name, language id, before bytes, after bytes) for every golden
    pair, sorted for stable parametrization."""
    out = []
    for before in sorted(CORPUS.rglob("*.before.*")):
        after = before.with_name(before.name.replace(".before.", ".after."))
        language = "json" if before.suffix == ".json" else "python"
        case = f"{before.parent.name}-{before.name.split('.before.')[0]}"
        out.append((case, language, before.read_bytes(), after.read_bytes()))
    return out


# ---------------------------------------------------------------------------
# synthetic trees


_KINDS = ["alpha", "beta", "gamma", "delta"]
_LEAF_KINDS = ["word", "mark"]
_FIELDS = ["head", "tail"]
_TEXTS = ["x", "y", "z", "w", "v"]


def leaf(rng: random.Random) -> Term:
    return Term(rng.choice(_LEAF_KINDS), ZERO_SPAN, rng.choice(_TEXTS))


def random_term(rng: random.Random, budget: int) -> Term:
    """A structurally valid random Term using at most `budget` nodes."""
    if budget <= 1 or rng.random() < 0.3:
        return leaf(rng)
    budget -= 1
    n_children = rng.randint(1, min(4, budget))
    shares = [budget // n_children] * n_children
    kids = [random_term(rng, max(1, s)) for s in shares]
    use_field = rng.random() < 0.4 and len(kids) >= 1
    if use_field:
        split = rng.randint(1, len(kids))
        fields = ((rng.choice(_FIELDS), tuple(kids[:split])),)
        children = tuple(kids[split:])
    else:
        fields = ()
        children = tuple(kids)
    return Term(rng.choice(_KINDS), ZERO_SPAN, None, fields, children)


def _all_positions(term: Term) -> list[Term]:
    from semascope.syntax import iter_terms

    return list(iter_terms(term))


def _rebuild(term: Term, target: Term, replacement: Term | None) -> Term | None:
    """Replace `target` (by identity) with `replacement` (None deletes)."""
    if term is target:
        return replacement
    if term.is_leaf:
        return term
    changed = False
    new_fields = []
    for name, group in term.fields:
        rebuilt = []
        for child in group:
            new = _rebuild(child, target, replacement)
            if new is not child:
                changed = True
            if new is not None:
                rebuilt.append(new)
        new_fields.append((name, tuple(rebuilt)))
    new_children = []
    for child in term.children:
        new = _rebuild(child, target, replacement)
        if new is not child:
            changed = True
        if new is not None:
            new_children.append(new)
    if not changed:
        return term
    if not any(g for _, g in new_fields) and not new_children:
        # an interior node that lost every child degrades to a leaf
        return Term(term.kind, term.span, "", (), (), term.error)
    return Term(
        term.kind,
        term.span,
        None,
        tuple((n, g) for n, g in new_fields if g),
        tuple(new_children),
        term.error,
    )


def mutate(rng: random.Random, term: Term, rounds: int) -> Term:
    """Apply up to `rounds` random structural edits."""
    for _ in range(rounds):
        positions = _all_positions(term)
        target = rng.choice(positions)
        op = rng.random()
        if op < 0.35:  # replace a subtree
            new = random_term(rng, rng.randint(1, 8))
        elif op < 0.6 and target is not term:  # delete a subtree
            new = None
        elif target.is_leaf:  # retext a leaf
            new = Term(target.kind, target.span, rng.choice(_TEXTS))
        else:  # graft an extra child
            new = Term(
                target.kind,
                target.span,
                None,
                target.fields,
                target.children + (random_term(rng, rng.randint(1, 6)),),
                target.error,
            )
        result = _rebuild(term, target, new)
        if result is not None:
            term = result
    return term
