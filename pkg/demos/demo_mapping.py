"""Compare the three cursor mapping strategies on the same hand motion.

The hand makes a slow drift then a fast flick.  Absolute mapping mirrors
position; linear relative applies a constant gain; nonlinear relative
boosts the fast flick while keeping the slow drift nearly linear.
"""
from handwave.mapping import (CursorState, MappingMode, MappingParams,
                              apply_mapping, default_active_rect,
                              nonlinear_magnitude)

FRAME = (640, 480)
IFACE = (640, 480)
params = MappingParams(active_rect=default_active_rect(*FRAME))

# slow drift (2 px/frame), pause, fast flick (35 px/frame)
hand_path = [(200.0 + 2.0 * i, 240.0) for i in range(10)]
hand_path += [hand_path[-1]] * 3
hand_path += [(hand_path[-1][0] + 35.0 * i, 240.0) for i in range(1, 7)]

cursors = {
    MappingMode.ABSOLUTE: CursorState(x=320, y=240, mode=MappingMode.ABSOLUTE),
    MappingMode.LINEAR_RELATIVE: CursorState(x=320, y=240, mode=MappingMode.LINEAR_RELATIVE),
    MappingMode.NONLINEAR_RELATIVE: CursorState(x=320, y=240, mode=MappingMode.NONLINEAR_RELATIVE),
}

print(f"{'step':>4} {'hand x':>7} | " + " | ".join(f"{m.value:>10}" for m in cursors))
for i, hand in enumerate(hand_path):
    cols = []
    for mode, state in cursors.items():
        apply_mapping(state, hand, params, IFACE)
        cols.append(f"{state.x:10.1f}")
    print(f"{i:>4} {hand[0]:>7.1f} | " + " | ".join(cols))

print("\napplied displacement for a step of |delta| pixels (gain curve):")
for d in (1, 5, 10, 20, 40, 80):
    lin = params.gain * d
    non = nonlinear_magnitude(float(d), params)
    print(f"  |delta|={d:>3}: linear {lin:6.1f}  nonlinear {non:6.1f}  "
          f"boost x{non / lin:.2f}")
