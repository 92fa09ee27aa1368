"""Model and report files (JSON, schema ``v1``) and CSV tables."""
from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from ._validation import check_norm
from .exceptions import ModelFileError
from .semigroup import MatrixFamily

SCHEMA = "v1"
_MODEL_KEYS = {"schema", "name", "description", "family", "base", "mixtures", "norm",
               "feedback", "schedule", "perturbation", "parameters"}


def _matrix(obj, what: str) -> np.ndarray:
    try:
        M = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFileError(f"{what}: not a numeric matrix ({exc})") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ModelFileError(f"{what}: expected a nonempty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ModelFileError(f"{what}: entries must be finite")
    return M


def _vector(obj, n: int, what: str) -> np.ndarray:
    try:
        v = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ModelFileError(f"{what}: not a numeric vector") from None
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise ModelFileError(f"{what}: expected {n} finite numbers")
    return v


@dataclass
class Model:
    """A parsed model file.

    Exactly one of ``family`` (explicit members) and ``base`` is given.  A
    base matrix is expanded to its mixtures when ``mixtures`` is set, or to
    the feedback pair ``{A - g b c^T, A + g b c^T}`` when ``feedback`` is set;
    otherwise it stands alone.  ``perturbation`` (one matrix per member, or
    one matrix for a base) defines ``F(tau)`` for scans.
    """

    family: Optional[list] = None
    base: Optional[list] = None
    mixtures: bool = False
    norm: str = "l1"
    feedback: Optional[dict] = None
    schedule: Optional[dict] = None
    perturbation: Optional[list] = None
    name: Optional[str] = None
    description: Optional[str] = None
    parameters: Optional[dict] = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "Model":
        if not isinstance(d, dict):
            raise ModelFileError("model must be a JSON object")
        if d.get("schema") != SCHEMA:
            raise ModelFileError(f"unrecognized schema version {d.get('schema')!r} (expected {SCHEMA!r})")
        extra = set(d) - _MODEL_KEYS
        if extra:
            raise ModelFileError(f"unknown model keys: {sorted(extra)}")
        m = cls(family=d.get("family"), base=d.get("base"), mixtures=bool(d.get("mixtures", False)),
                norm=d.get("norm", "l1"), feedback=d.get("feedback"), schedule=d.get("schedule"),
                perturbation=d.get("perturbation"), name=d.get("name"),
                description=d.get("description"), parameters=d.get("parameters"))
        m.validate()
        return m

    def validate(self) -> None:
        if (self.family is None) == (self.base is None):
            raise ModelFileError("give exactly one of 'family' and 'base'")
        try:
            check_norm(self.norm)
        except ValueError as exc:
            raise ModelFileError(str(exc)) from None
        if self.family is not None:
            if self.mixtures or self.feedback:
                raise ModelFileError("'mixtures' and 'feedback' need 'base', not 'family'")
            if not isinstance(self.family, list) or not self.family:
                raise ModelFileError("'family' must be a nonempty list of matrices")
            mats = [_matrix(A, f"family[{i}]") for i, A in enumerate(self.family)]
            if len({A.shape for A in mats}) != 1:
                raise ModelFileError("family members must all have the same size")
            n = mats[0].shape[0]
            if self.perturbation is not None:
                if not isinstance(self.perturbation, list) or len(self.perturbation) != len(mats):
                    raise ModelFileError("'perturbation' needs one matrix per family member")
                for i, E in enumerate(self.perturbation):
                    if _matrix(E, f"perturbation[{i}]").shape != (n, n):
                        raise ModelFileError(f"perturbation[{i}] has the wrong size")
        else:
            A = _matrix(self.base, "base")
            n = A.shape[0]
            if self.mixtures and self.feedback:
                raise ModelFileError("'mixtures' and 'feedback' are exclusive")
            if self.feedback is not None:
                fb = self.feedback
                if not isinstance(fb, dict) or not {"b", "c", "gamma"} <= set(fb):
                    raise ModelFileError("'feedback' needs keys b, c, gamma")
                _vector(fb["b"], n, "feedback.b")
                _vector(fb["c"], n, "feedback.c")
                if not isinstance(fb["gamma"], (int, float)):
                    raise ModelFileError("feedback.gamma must be a number")
            if self.perturbation is not None and _matrix(self.perturbation, "perturbation").shape != (n, n):
                raise ModelFileError("perturbation has the wrong size")
        if self.schedule is not None:
            from .desync import schedule_from_dict
            try:
                schedule_from_dict(self.schedule)
            except (KeyError, ValueError, TypeError) as exc:
                raise ModelFileError(f"bad schedule: {exc}") from None

    def to_dict(self) -> dict:
        d: dict = {"schema": SCHEMA}
        for key in ("name", "description", "parameters"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.family is not None:
            d["family"] = self.family
        else:
            d["base"] = self.base
            if self.mixtures:
                d["mixtures"] = True
        d["norm"] = self.norm
        for key in ("feedback", "schedule", "perturbation"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d

    # -- evaluation -------------------------------------------------------

    @property
    def norm_tag(self) -> str:
        return check_norm(self.norm)

    @property
    def N(self) -> int:
        src = self.family[0] if self.family is not None else self.base
        return len(src)

    def family_at(self, tau: float = 0.0) -> MatrixFamily:
        """``F(tau)``; ``tau = 0`` gives the unperturbed family."""
        if tau and self.perturbation is None:
            raise ModelFileError("model has no 'perturbation' block")
        if self.family is not None:
            mats = [np.array(A, dtype=float) for A in self.family]
            if tau:
                mats = [A + tau * np.array(E, dtype=float) for A, E in zip(mats, self.perturbation)]
            return MatrixFamily(mats)
        A = np.array(self.base, dtype=float)
        if tau:
            A = A + tau * np.array(self.perturbation, dtype=float)
        if self.mixtures:
            from .desync import MixtureFamily
            return MixtureFamily(A, self.norm_tag)
        if self.feedback is not None:
            from .stability import circle_feedback_family
            fb = self.feedback
            return circle_feedback_family(A, fb["b"], fb["c"], fb["gamma"]).family
        return MatrixFamily([A])

    @property
    def base_matrix(self) -> Optional[np.ndarray]:
        return None if self.base is None else np.array(self.base, dtype=float)


def parse_model(text: str) -> Model:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"malformed JSON: {exc}") from None
    return Model.from_dict(d)


def load_model(path: str) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc}") from None
    return parse_model(text)


def serialize_model(model: Model) -> str:
    return json.dumps(model.to_dict(), indent=2)


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values and containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def make_report(command: str, inputs: dict, result: Any, seed: int, wall_time: float) -> dict:
    from . import __version__
    return {
        "schema": SCHEMA,
        "tool": "peakbound",
        "version": __version__,
        "command": command,
        "inputs": to_jsonable(inputs),
        "result": to_jsonable(result),
        "seed": seed,
        "wall_time": wall_time,
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2)


def rows_to_csv(rows: Iterable[Any], fields: Sequence[str]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        vals = [r.get(f) if isinstance(r, dict) else getattr(r, f) for f in fields]
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in vals])
    return buf.getvalue()
