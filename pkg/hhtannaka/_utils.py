from dataclasses import dataclass, field
from functools import wraps
from typing import Any, Iterable
import warnings

from tqdm import tqdm


def unstable(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        warnings.warn(
            f"{func.__name__}() is unstable", category=FutureWarning, stacklevel=2
        )
        return func(*args, **kwargs)
    return wrapper


def heuristic(msg: str) -> None:
    warnings.warn(msg, category=RuntimeWarning, stacklevel=3)


def sign(n: int) -> int:
    """(-1)^n"""
    return -1 if n % 2 else 1


def koszul_sign(degrees: list[int], perm: list[int]) -> int:
    """Sign of rearranging graded tokens: position i of the output holds token perm[i].

    Every pair of tokens whose relative order flips contributes (-1)^{|x||y|}.
    """
    s = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s += degrees[perm[i]] * degrees[perm[j]]
    return sign(s)


def progress(it: Iterable, desc: str, verbose: bool = False, total: int | None = None):
    return tqdm(it, desc=desc, total=total, disable=not verbose, leave=False)


@dataclass
class Report:
    """Outcome of a validator: a verdict, itemized failures and free-form notes."""

    name: str
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        self.failures.append(msg)

    def note(self, msg: str) -> None:
        self.notes.append(msg)

    def merge(self, other: "Report") -> "Report":
        self.failures.extend(f"{other.name}: {f}" for f in other.failures)
        self.notes.extend(f"{other.name}: {n}" for n in other.notes)
        self.checked += other.checked
        return self

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        lines = [f"{self.name}: {'pass' if self.passed else 'FAIL'} ({self.checked} checks)"]
        lines += [f"  - {f}" for f in self.failures]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def fmt_table(header: list[str], rows: list[list[Any]], csv: bool = False) -> str:
    if csv:
        return "\n".join(",".join(str(x) for x in r) for r in [header] + rows)
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    line = lambda r: "  ".join(str(x).rjust(w) for x, w in zip(r, widths))
    return "\n".join([line(header)] + [line(r) for r in rows])
