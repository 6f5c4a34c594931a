"""Reproduce a parameter count by hand and compare against the calculator."""

from naap440.schemes import (CountingRules, LayerSpec, Scheme, count_macs,
                             count_params, scheme_features)

scheme = Scheme((
    LayerSpec(kernel_size=3, width=8, stride=2),
    LayerSpec(kernel_size=3, width=16, stride=2),
    LayerSpec(kernel_size=3, width=32, stride=1),
))

# conv weights are kernel^2 * in * out with no bias, batch norm adds
# 2 * width, the linear head adds width * classes + classes
conv1 = 3 * 3 * 3 * 8 + 2 * 8
conv2 = 3 * 3 * 8 * 16 + 2 * 16
conv3 = 3 * 3 * 16 * 32 + 2 * 32
head = 32 * 10 + 10
manual = conv1 + conv2 + conv3 + head
print(f"manual parameter count: {manual}")
print(f"count_params:           {count_params(scheme)}")

# MACs walk the spatial grid: 32x32 input, halved (rounding up) per stride-2
print(f"\ncount_macs: {count_macs(scheme)}")

# the counting flags exist so the counts can be calibrated against a
# published table that may or may not include these pieces
for rules, label in (
        (CountingRules(), "everything"),
        (CountingRules(include_batchnorm=False), "no batch norm"),
        (CountingRules(include_head=False), "no head"),
        (CountingRules(head_bias=False), "no head bias")):
    print(f"{label:14s} -> {count_params(scheme, rules=rules)} params")

f = scheme_features(scheme)
print(f"\nfeature vector: {f.as_dict()}")
