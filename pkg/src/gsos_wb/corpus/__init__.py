"""Built-in specifications shipped with the package."""

from __future__ import annotations

from importlib import resources

from ..dsl import Spec, parse_spec

# base calculus each extension adds its operator to
BASES = {
    "ccs-core": None,
    "spc": None,
    "neg-ext": "ccs-core",
    "imp-ext": "ccs-core",
    "cur-ext": "ccs-core",
    "oba-ext": "ccs-core",
    "pause-ext": "spc",
}


def builtin_names() -> list[str]:
    return list(BASES)


def builtin_text(name: str) -> str:
    if name not in BASES:
        raise KeyError(f"unknown builtin spec {name!r}; choose from {', '.join(BASES)}")
    return resources.files(__name__).joinpath(f"{name}.gsos").read_text(encoding="utf-8")


def load_builtin(name: str) -> Spec:
    return parse_spec(builtin_text(name))


def added_operators(name: str) -> set[str]:
    """Operators an extension declares on top of its base calculus."""
    spec = load_builtin(name)
    base = BASES[name]
    if base is None:
        return set(spec.signature.operators)
    return set(spec.signature.operators) - set(load_builtin(base).signature.operators)
