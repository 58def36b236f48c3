"""Regenerate the checked-in 'fox' gesture script.

Targets are taken from the shipped keyboard layout and converted from
interface coordinates back to hand positions by inverting the absolute
mapping, so the script stays correct if the keyboard layout moves.

Run:  python3 demos/make_fox_script.py [out_path]
"""
import sys
from importlib import resources

from handwave.interface import parse_interface
from handwave.mapping import default_active_rect

FRAME_W, FRAME_H = 640, 480
OPEN_RX, OPEN_RY = 46.0, 54.0


def zone_center(spec, page_id, zone_id):
    for z in spec.page(page_id).zones:
        if z.id == zone_id:
            return (z.x + z.w / 2.0, z.y + z.h / 2.0)
    raise KeyError(f"{page_id}/{zone_id}")


def to_hand(q, rect, iface_dims):
    ax, ay, aw, ah = rect
    iw, ih = iface_dims
    return (ax + q[0] / iw * aw, ay + q[1] / ih * ah)


def interpolate(a, b, steps):
    for i in range(1, steps + 1):
        t = i / steps
        yield (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def main(out_path="src/handwave/data/fox.script"):
    xml = resources.files("handwave").joinpath("data/keyboard.xml").read_text()
    spec = parse_interface(xml)
    rect = default_active_rect(FRAME_W, FRAME_H)
    dims = (spec.width, spec.height)

    targets = [
        to_hand(zone_center(spec, "letters1", "key_f"), rect, dims),
        to_hand(zone_center(spec, "letters1", "nav_letters2"), rect, dims),
        to_hand(zone_center(spec, "letters2", "key_o"), rect, dims),
        to_hand(zone_center(spec, "letters2", "key_x"), rect, dims),
    ]

    lines = [
        "# Gesture trace: type the word 'fox' on the paged keyboard.",
        "# Presses: F (letters1), N-Z page switch, O, X (letters2).",
        f"@size {FRAME_W} {FRAME_H}",
        "@background 70 80 90",
        "@distractor 24 24 90 70",
        "@distractor 520 380 90 70",
        "@skin 15 0.55 0.80",
        "@openness 0.45",
        "@noise 0",
        "@seed 1",
        "@fps 30",
    ]

    def pose(p, state):
        lines.append(f"{p[0]:.1f} {p[1]:.1f} {OPEN_RX:.1f} {OPEN_RY:.1f} {state}")

    pos = (320.0, 240.0)
    pose(pos, "open")  # hand enters at frame center
    for target in targets:
        for p in interpolate(pos, target, 6):
            pose(p, "open")
        pos = target
        for _ in range(3):
            pose(pos, "open")    # settle, feed the area baseline
        for _ in range(4):
            pose(pos, "closed")  # press fires on the 3rd closed frame
        for _ in range(3):
            pose(pos, "open")    # release

    text = "\n".join(lines) + "\n"
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {out_path}: {sum(1 for l in lines if l and not l.startswith(('#', '@')))} frames")


if __name__ == "__main__":
    main(*sys.argv[1:])
