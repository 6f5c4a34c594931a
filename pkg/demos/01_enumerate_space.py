"""Walk the default scheme space and look at what comes out.

The enumerator does a depth-first walk over per-layer candidate sets and
keeps every scheme whose stride pattern lands inside the stage bounds.
With the shipped defaults that is exactly 440 networks.
"""

from collections import Counter

from naap440.schemes import default_constraint_spec, enumerate_schemes, scheme_features

spec = default_constraint_spec()
schemes = enumerate_schemes(spec)
print(f"total schemes: {len(schemes)}")

by_depth = Counter(s.depth for s in schemes)
by_stages = Counter(s.num_stages for s in schemes)
with_skip = sum(1 for s in schemes if any(l.skip for l in s.layers))
print(f"by depth:  {dict(sorted(by_depth.items()))}")
print(f"by stages: {dict(sorted(by_stages.items()))}")
print(f"with a skip connection: {with_skip}")

def describe(scheme):
    parts = []
    for l in scheme.layers:
        tag = f"k{l.kernel_size} w{l.width} s{l.stride}"
        parts.append(tag + " +skip" if l.skip else tag)
    return " | ".join(parts)

print("\nfirst scheme:", describe(schemes[0]))
print("last scheme: ", describe(schemes[-1]))

# parameter counts span roughly two orders of magnitude across the space
params = [scheme_features(s, spec.counting).num_params for s in schemes]
print(f"\nparameters: min {min(params)}, max {max(params)}")

smallest = min(range(len(schemes)), key=lambda i: params[i])
largest = max(range(len(schemes)), key=lambda i: params[i])
print(f"smallest network (id {smallest}):", describe(schemes[smallest]))
print(f"largest network  (id {largest}):", describe(schemes[largest]))
