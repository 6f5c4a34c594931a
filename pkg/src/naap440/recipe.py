"""Training recipe manifest.

The dataset ships only measurements; the manifest records how to regenerate
them.  It captures the shared CIFAR10 training recipe plus a per-scheme layer
listing, serialized as JSON so external training harnesses can consume it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import DataError
from .schemes import LayerSpec, Scheme

__all__ = ["TrainingRecipe", "export_manifest", "parse_manifest"]


@dataclass(frozen=True)
class TrainingRecipe:
    """Hyperparameters used to train every scheme."""

    dataset: str = "CIFAR10"
    num_epochs: int = 90
    batch_size: int = 256
    optimizer: str = "sgd"
    momentum: float = 0.9
    weight_decay: float = 1e-4
    base_learning_rate: float = 0.1
    lr_decay_per_epoch: float = 0.1
    warm_restart_every: int = 3
    loss: str = "cross_entropy"
    deterministic: bool = True
    seed: int = 0

    @property
    def num_cycles(self) -> int:
        return self.num_epochs // self.warm_restart_every

    def lr_at_epoch(self, epoch: int) -> float:
        """Learning rate in force during ``epoch`` (zero-based).

        The rate starts at base_learning_rate, decays by lr_decay_per_epoch
        each epoch, and resets to the base at every warm restart.
        """
        if epoch < 0 or epoch >= self.num_epochs:
            raise ValueError(f"epoch {epoch} outside [0, {self.num_epochs})")
        within = epoch % self.warm_restart_every
        return self.base_learning_rate * self.lr_decay_per_epoch ** within


def _layer_entry(layer: LayerSpec) -> dict:
    return {
        "kernel_size": layer.kernel_size,
        "width": layer.width,
        "stride": layer.stride,
        "padding": layer.padding,
        "skip": layer.skip,
        "batch_norm": True,
        "activation": "relu",
        "bias": False,
    }


def export_manifest(schemes: list[Scheme], recipe: TrainingRecipe | None = None,
                    path: str | Path | None = None) -> dict:
    """Build (and optionally write) the training manifest for ``schemes``.

    Scheme ids are assigned by position, matching enumeration order.
    """
    recipe = recipe or TrainingRecipe()
    manifest = {
        "recipe": asdict(recipe),
        "head": {"pooling": "global_average", "classifier": "linear", "bias": True},
        "schemes": [
            {
                "id": i,
                "depth": scheme.depth,
                "num_stages": scheme.num_stages,
                "layers": [_layer_entry(layer) for layer in scheme.layers],
            }
            for i, scheme in enumerate(schemes)
        ],
    }
    if path is not None:
        Path(path).write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def parse_manifest(path: str | Path) -> tuple[TrainingRecipe, list[Scheme]]:
    """Read a manifest back into a recipe and scheme list.

    Raises DataError when the file does not round-trip into valid schemes.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    try:
        recipe = TrainingRecipe(**raw["recipe"])
        entries = raw["schemes"]
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: missing or malformed manifest section ({exc})") from exc
    schemes = []
    for entry in entries:
        try:
            layers = tuple(
                LayerSpec(
                    kernel_size=l["kernel_size"],
                    width=l["width"],
                    stride=l["stride"],
                    skip=l["skip"],
                )
                for l in entry["layers"]
            )
            schemes.append(Scheme(layers))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: bad scheme entry {entry.get('id')} ({exc})") from exc
    return recipe, schemes
