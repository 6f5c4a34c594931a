"""Network scheme model: constraint-driven enumeration and structural measurement.

A scheme is a symbolic convolutional network: an ordered list of layers, each
with a kernel size, output width, stride and an optional skip (residual)
connection.  Every conv layer is followed by batch norm and ReLU, uses no bias,
and pads by kernel_size // 2.  The classifier head is global average pooling
into a single fully connected layer.

The search space is declarative data (:class:`ConstraintSpec`), loaded from a
YAML file, so alternative spaces never require code changes.  Enumeration is a
depth-first scan with a fixed candidate order, which makes scheme ids stable
across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError

__all__ = [
    "LayerSpec",
    "Scheme",
    "LayerOptions",
    "CountingRules",
    "ConstraintSpec",
    "SchemeFeatures",
    "FEATURE_NAMES",
    "enumerate_schemes",
    "count_params",
    "count_macs",
    "scheme_features",
    "load_constraint_spec",
    "default_constraint_spec",
]


@dataclass(frozen=True)
class LayerSpec:
    """One convolutional layer of a scheme."""

    kernel_size: int
    width: int
    stride: int
    skip: bool = False

    def __post_init__(self):
        if self.kernel_size <= 0 or self.kernel_size % 2 == 0:
            raise ValueError(f"kernel_size must be odd and positive, got {self.kernel_size}")
        if self.width <= 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if self.stride not in (1, 2):
            raise ValueError(f"stride must be 1 or 2, got {self.stride}")
        if self.skip and self.stride != 1:
            raise ValueError("skip requires stride 1 (input and output shapes must match)")

    @property
    def padding(self) -> int:
        return self.kernel_size // 2


@dataclass(frozen=True)
class Scheme:
    """An ordered tuple of layers.  Shape rules for skips are enforced here;
    space-level rules (depth range, stride pattern) belong to ConstraintSpec."""

    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        for i, layer in enumerate(self.layers):
            if layer.skip:
                if i == 0:
                    raise ValueError("first layer cannot have a skip connection")
                if layer.width != self.layers[i - 1].width:
                    raise ValueError(
                        f"layer {i + 1} skip requires width equal to layer {i}"
                    )

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def strides(self) -> tuple[int, ...]:
        return tuple(layer.stride for layer in self.layers)

    @property
    def num_stages(self) -> int:
        """Stages are counted as downsampling (stride-2) convolutions."""
        return sum(1 for layer in self.layers if layer.stride == 2)

    def key(self) -> tuple:
        """Hashable identity used for duplicate checks and stable ids."""
        return tuple((l.kernel_size, l.width, l.stride, l.skip) for l in self.layers)


@dataclass(frozen=True)
class LayerOptions:
    """Candidate sets for one layer position."""

    kernel_sizes: tuple[int, ...]
    widths: tuple[int, ...]
    strides: tuple[int, ...]


@dataclass(frozen=True)
class CountingRules:
    """What the parameter / MAC calculators include beyond raw convolutions.

    The published tabular release does not spell out whether batch-norm and
    classifier-head parameters are part of its NumParams column; these flags
    let the counts be calibrated against it without code changes.
    """

    include_batchnorm: bool = True
    include_head: bool = True
    head_bias: bool = True
    input_height: int = 32
    input_width: int = 32
    input_channels: int = 3
    num_classes: int = 10


@dataclass(frozen=True)
class ConstraintSpec:
    """Declarative description of a scheme population."""

    depth_options: tuple[int, ...]
    layers: tuple[LayerOptions, ...]
    min_stages: int = 2
    max_stages: int = 3
    allow_skip: bool = True
    counting: CountingRules = field(default_factory=CountingRules)

    def validate(self) -> None:
        if not self.depth_options:
            raise ConfigError("depth_options is empty")
        if any(d < 1 for d in self.depth_options):
            raise ConfigError(f"depth_options must be positive, got {self.depth_options}")
        if max(self.depth_options) > len(self.layers):
            raise ConfigError(
                f"depth_options includes {max(self.depth_options)} but only "
                f"{len(self.layers)} layer positions are configured"
            )
        for i, opts in enumerate(self.layers, start=1):
            for name, values in (("kernel_sizes", opts.kernel_sizes),
                                 ("widths", opts.widths),
                                 ("strides", opts.strides)):
                if not values:
                    raise ConfigError(f"layers[{i}].{name} is empty")
            if any(k <= 0 or k % 2 == 0 for k in opts.kernel_sizes):
                raise ConfigError(f"layers[{i}].kernel_sizes must be odd and positive")
            if any(w <= 0 for w in opts.widths):
                raise ConfigError(f"layers[{i}].widths must be positive")
            if any(s not in (1, 2) for s in opts.strides):
                raise ConfigError(f"layers[{i}].strides must be drawn from {{1, 2}}")
        if self.min_stages > self.max_stages:
            raise ConfigError(
                f"min_stages {self.min_stages} exceeds max_stages {self.max_stages}"
            )
        for depth in self.depth_options:
            forced = sum(1 for opts in self.layers[:depth] if opts.strides == (2,))
            loose = sum(1 for opts in self.layers[:depth] if 1 in opts.strides)
            if forced > self.max_stages or forced + loose < self.min_stages:
                raise ConfigError(
                    f"stage bounds [{self.min_stages}, {self.max_stages}] are not "
                    f"satisfiable at depth {depth} given the stride candidates"
                )


FEATURE_NAMES = (
    "depth",
    "num_stages",
    "first_layer_width",
    "last_layer_width",
    "num_params",
    "log_num_params",
    "num_macs",
)


@dataclass(frozen=True)
class SchemeFeatures:
    """Structural features of one scheme, as stored in the dataset."""

    depth: int
    num_stages: int
    first_layer_width: int
    last_layer_width: int
    num_params: int
    log_num_params: float
    num_macs: int

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


def enumerate_schemes(spec: ConstraintSpec) -> list[Scheme]:
    """Enumerate every scheme satisfying ``spec``, in deterministic DFS order.

    Candidate order is fixed: depths ascending; layers outermost first; within
    a layer, kernel sizes ascending, then widths ascending, then strides
    ascending, then skip=False before skip=True.
    """
    spec.validate()
    out: list[Scheme] = []
    for depth in sorted(spec.depth_options):
        prefix: list[LayerSpec] = []

        def extend(position: int, stages_so_far: int):
            if position == depth:
                if spec.min_stages <= stages_so_far <= spec.max_stages:
                    out.append(Scheme(tuple(prefix)))
                return
            opts = spec.layers[position]
            remaining = depth - position
            for kernel in sorted(opts.kernel_sizes):
                for width in sorted(opts.widths):
                    for stride in sorted(opts.strides):
                        stages = stages_so_far + (1 if stride == 2 else 0)
                        # prune: too many stages already, or too few reachable
                        if stages > spec.max_stages:
                            continue
                        if stages + (remaining - 1) < spec.min_stages:
                            continue
                        skip_options = [False]
                        if (spec.allow_skip and position > 0 and stride == 1
                                and width == prefix[-1].width):
                            skip_options = [False, True]
                        for skip in skip_options:
                            prefix.append(LayerSpec(kernel, width, stride, skip))
                            extend(position + 1, stages)
                            prefix.pop()

        extend(0, 0)
    return out


def _spatial_out(size: int, stride: int) -> int:
    # padding k//2 on an odd kernel keeps size at stride 1 and halves
    # (rounding up) at stride 2
    return -(-size // stride)


def count_params(scheme: Scheme, input_channels: int = 3, num_classes: int = 10,
                 rules: CountingRules | None = None) -> int:
    """Total learnable parameters of the realized network.

    Convolutions are bias-free (kernel² * in * out).  Batch norm adds 2 * width
    per layer and the head adds last_width * num_classes (+ num_classes bias)
    when the corresponding rules are enabled.
    """
    if input_channels < 1 or num_classes < 1:
        raise ValueError("input_channels and num_classes must be >= 1")
    rules = rules or CountingRules()
    total = 0
    in_ch = input_channels
    for layer in scheme.layers:
        total += layer.kernel_size ** 2 * in_ch * layer.width
        if rules.include_batchnorm:
            total += 2 * layer.width
        in_ch = layer.width
    if rules.include_head:
        total += in_ch * num_classes
        if rules.head_bias:
            total += num_classes
    return total


def count_macs(scheme: Scheme, input_height: int = 32, input_width: int = 32,
               input_channels: int = 3, rules: CountingRules | None = None) -> int:
    """Multiply-accumulate count for one forward pass.

    Per conv layer: kernel² * in * out * out_h * out_w with spatial dims halved
    (rounding up) at stride 2.  Batch norm, ReLU, pooling and skip additions
    contribute no multiplies; the head contributes last_width * num_classes.
    """
    if input_height < 1 or input_width < 1 or input_channels < 1:
        raise ValueError("input dimensions must be positive")
    rules = rules or CountingRules()
    total = 0
    h, w, in_ch = input_height, input_width, input_channels
    for layer in scheme.layers:
        h = _spatial_out(h, layer.stride)
        w = _spatial_out(w, layer.stride)
        total += layer.kernel_size ** 2 * in_ch * layer.width * h * w
        in_ch = layer.width
    if rules.include_head:
        total += in_ch * rules.num_classes
    return total


def scheme_features(scheme: Scheme, rules: CountingRules | None = None) -> SchemeFeatures:
    """All structural features of one scheme, using the calibrated counting rules."""
    rules = rules or CountingRules()
    params = count_params(scheme, rules.input_channels, rules.num_classes, rules)
    macs = count_macs(scheme, rules.input_height, rules.input_width,
                      rules.input_channels, rules)
    return SchemeFeatures(
        depth=scheme.depth,
        num_stages=scheme.num_stages,
        first_layer_width=scheme.layers[0].width,
        last_layer_width=scheme.layers[-1].width,
        num_params=params,
        log_num_params=math.log(params),
        num_macs=macs,
    )


def _parse_layer(raw: dict, index: int) -> LayerOptions:
    try:
        return LayerOptions(
            kernel_sizes=tuple(raw["kernel_sizes"]),
            widths=tuple(raw["widths"]),
            strides=tuple(raw["strides"]),
        )
    except KeyError as exc:
        raise ConfigError(f"layers[{index}] is missing key {exc.args[0]!r}") from exc


def constraint_spec_from_dict(raw: dict) -> ConstraintSpec:
    """Build a ConstraintSpec from parsed YAML, validating as we go."""
    try:
        depth_options = tuple(raw["depth_options"])
        layer_raw = raw["layers"]
    except KeyError as exc:
        raise ConfigError(f"constraint spec is missing key {exc.args[0]!r}") from exc
    layers = tuple(_parse_layer(entry, i + 1) for i, entry in enumerate(layer_raw))
    stages = raw.get("stage_bounds", {})
    counting_raw = raw.get("counting", {})
    known = {"include_batchnorm", "include_head", "head_bias", "input_height",
             "input_width", "input_channels", "num_classes"}
    unknown = set(counting_raw) - known
    if unknown:
        raise ConfigError(f"unknown counting keys: {sorted(unknown)}")
    spec = ConstraintSpec(
        depth_options=depth_options,
        layers=layers,
        min_stages=int(stages.get("min", 2)),
        max_stages=int(stages.get("max", 3)),
        allow_skip=bool(raw.get("skip_connections", True)),
        counting=CountingRules(**counting_raw),
    )
    spec.validate()
    return spec


def load_constraint_spec(path: str | Path) -> ConstraintSpec:
    """Load a constraint spec from a YAML file."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return constraint_spec_from_dict(raw)


def default_constraint_spec() -> ConstraintSpec:
    """The space shipped with the package (enumerates to exactly 440 schemes)."""
    from importlib.resources import files

    resource = files("naap440.configs").joinpath("default_space.yaml")
    raw = yaml.safe_load(resource.read_text())
    return constraint_spec_from_dict(raw)
