"""Labeled/unlabeled split bookkeeping and the hidden-label firewall.

The pool's true labels exist only for the simulated oracle. They live in a
private field of ``UnlabeledPool`` and the only reader is
``SimulatedOracle.label`` -- two interfaces over one store, so the
oracle-free property of a run is checkable (the oracle counts its calls).
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientClassSamples, UnknownSample

PROVENANCES = ("initial", "oracle", "confident", "generated")

# Generated samples are not members of the source dataset; they get ids in a
# reserved range so id sets stay disjoint from dataset indices.
GENERATED_ID_BASE = 1 << 30


@dataclass(frozen=True)
class SplitSpec:
    n_per_class: int = 100
    seed: int = 0
    class_count: int = 10


class LabeledSet:
    """Ordered labeled samples with provenance tags."""

    def __init__(self):
        self._images: list[np.ndarray] = []
        self._labels: list[np.ndarray] = []
        self._provenance: list[np.ndarray] = []
        self._ids: list[np.ndarray] = []

    def add(self, images, labels, provenance: str, ids) -> None:
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        images = np.asarray(images, dtype=np.float32)
        labels = np.asarray(labels, dtype=np.int64)
        ids = np.asarray(ids, dtype=np.int64)
        if not (len(images) == len(labels) == len(ids)):
            raise ValueError("images, labels and ids must have equal length")
        if len(images) == 0:
            return
        existing = self.ids
        if len(existing) and np.intersect1d(existing, ids).size:
            raise ValueError("duplicate ids added to labeled set")
        self._images.append(images)
        self._labels.append(labels)
        self._provenance.append(
            np.full(len(images), PROVENANCES.index(provenance), dtype=np.int8)
        )
        self._ids.append(ids)

    def __len__(self) -> int:
        return sum(len(a) for a in self._labels)

    @property
    def images(self) -> np.ndarray:
        if not self._images:
            return np.zeros((0, 28, 28), dtype=np.float32)
        return np.concatenate(self._images)

    @property
    def labels(self) -> np.ndarray:
        if not self._labels:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(self._labels)

    @property
    def ids(self) -> np.ndarray:
        if not self._ids:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(self._ids)

    @property
    def provenance(self) -> np.ndarray:
        """Per-sample provenance names (str array)."""
        if not self._provenance:
            return np.zeros(0, dtype=object)
        codes = np.concatenate(self._provenance)
        return np.array([PROVENANCES[c] for c in codes], dtype=object)

    def class_counts(self, n_classes: int = 10) -> np.ndarray:
        return np.bincount(self.labels, minlength=n_classes)

    def copy(self) -> "LabeledSet":
        out = LabeledSet()
        out._images = [a.copy() for a in self._images]
        out._labels = [a.copy() for a in self._labels]
        out._provenance = [a.copy() for a in self._provenance]
        out._ids = [a.copy() for a in self._ids]
        return out


class UnlabeledPool:
    """Pool view exposing only ids and pixels; true labels stay private."""

    def __init__(self, images, ids, hidden_labels):
        self._images = np.asarray(images, dtype=np.float32)
        self._ids = np.asarray(ids, dtype=np.int64)
        self.__hidden_labels = np.asarray(hidden_labels, dtype=np.int64)
        if not (len(self._images) == len(self._ids) == len(self.__hidden_labels)):
            raise ValueError("images, ids and hidden labels must align")
        self._index = {int(i): k for k, i in enumerate(self._ids)}

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def ids(self) -> np.ndarray:
        return self._ids.copy()

    def images(self, ids=None) -> np.ndarray:
        if ids is None:
            return self._images.copy()
        rows = self._locate(ids)
        return self._images[rows].copy()

    def remove(self, ids) -> None:
        rows = self._locate(ids)
        keep = np.ones(len(self._ids), dtype=bool)
        keep[rows] = False
        self._images = self._images[keep]
        self.__hidden_labels = self.__hidden_labels[keep]
        self._ids = self._ids[keep]
        self._index = {int(i): k for k, i in enumerate(self._ids)}

    def copy(self) -> "UnlabeledPool":
        return UnlabeledPool(self._images, self._ids, self.__hidden_labels)

    def _locate(self, ids) -> np.ndarray:
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        try:
            return np.array([self._index[int(i)] for i in ids], dtype=np.intp)
        except KeyError as e:
            raise UnknownSample(f"id {e.args[0]} is not in the pool") from None

    # Private handle for SimulatedOracle only; OFAL-path code must not call it.
    def _hidden_labels_for(self, ids) -> np.ndarray:
        rows = self._locate(ids)
        return self.__hidden_labels[rows].copy()


class SimulatedOracle:
    """The single interface through which hidden pool labels are readable.

    Counts every labeled sample; a solo oracle-free run must finish with
    ``calls == 0``.
    """

    def __init__(self, pool: UnlabeledPool):
        self._pool = pool
        self.calls = 0

    def label(self, ids) -> np.ndarray:
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        if len(ids) == 0:
            return np.zeros(0, dtype=np.int64)
        labels = self._pool._hidden_labels_for(ids)
        self.calls += len(ids)
        return labels

    def rebind(self, pool: UnlabeledPool) -> None:
        """Point the oracle at a replacement pool object (checkpoint restore)."""
        self._pool = pool


def make_split(images, labels, spec: SplitSpec):
    """Balanced labeled/pool split: n_per_class per class, rest is the pool.

    Deterministic in ``spec.seed``; raises InsufficientClassSamples when a
    class cannot supply its quota.
    """
    images = np.asarray(images, dtype=np.float32)
    labels = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(spec.seed)
    chosen = []
    for c in range(spec.class_count):
        members = np.flatnonzero(labels == c)
        if len(members) < spec.n_per_class:
            raise InsufficientClassSamples(
                f"class {c} has {len(members)} samples, split needs {spec.n_per_class}"
            )
        pick = rng.permutation(members)[: spec.n_per_class]
        chosen.append(pick)
    chosen = np.sort(np.concatenate(chosen)) if chosen else np.zeros(0, dtype=np.int64)
    mask = np.zeros(len(labels), dtype=bool)
    mask[chosen] = True

    labeled = LabeledSet()
    if len(chosen):
        labeled.add(images[chosen], labels[chosen], "initial", chosen)
    pool_ids = np.flatnonzero(~mask)
    pool = UnlabeledPool(images[pool_ids], pool_ids, labels[pool_ids])
    return labeled, pool
