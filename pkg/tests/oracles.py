"""Independent brute-force oracles shared by unit and acceptance tests.

These stay deliberately naive: definitional double loops and flood fills
that cannot share a code path with the implementations they check.
"""
import numpy as np


def erode_bruteforce(mask, cells):
    """Definitional double loop; out-of-bounds neighbors are false."""
    h, w = mask.shape
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            ok = True
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if not cells[dy + 1, dx + 1]:
                        continue
                    yy, xx = y + dy, x + dx
                    inside = 0 <= yy < h and 0 <= xx < w
                    if not (inside and mask[yy, xx]):
                        ok = False
            out[y, x] = ok
    return out


def dilate_bruteforce(mask, cells):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            hit = False
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if not cells[dy + 1, dx + 1]:
                        continue
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and mask[yy, xx]:
                        hit = True
            out[y, x] = hit
    return out


def label_oracle(mask, connectivity):
    """Raster-scan flood fill; components in first-encounter order."""
    h, w = mask.shape
    nbrs = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if connectivity == 8:
        nbrs = nbrs + [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    seen = np.zeros((h, w), dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or seen[y, x]:
                continue
            comp = []
            stack = [(y, x)]
            seen[y, x] = True
            while stack:
                cy, cx = stack.pop()
                comp.append((cx, cy))
                for dy, dx in nbrs:
                    yy, xx = cy + dy, cx + dx
                    if 0 <= yy < h and 0 <= xx < w and mask[yy, xx] and not seen[yy, xx]:
                        seen[yy, xx] = True
                        stack.append((yy, xx))
            comps.append(frozenset(comp))
    return comps


def scan_zones(page, px, py):
    """Linear rectangle scan with half-open containment."""
    for z in page.zones:
        if z.x <= px < z.x + z.w and z.y <= py < z.y + z.h:
            return z.id
    return None
