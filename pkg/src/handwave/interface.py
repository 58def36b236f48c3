"""Virtual interfaces described in XML: parsing, hit testing, interaction.

Document dialect (version 1):

    <interface name="..." width="int" height="int" start="pageId">
      <page id="pageId">
        <zone id="..." x="int" y="int" w="int" h="int" label="text"
              action="KEY_PRESS|KEY_BACKSPACE|KEY_RETURN|KEY_SPACE|MOUSE_LEFT|
                      MOUSE_RIGHT|MOUSE_DOUBLE|WHEEL_UP|WHEEL_DOWN|PAGE_GOTO|NOOP"
              p1="int" p2="int"/>
      </page>
    </interface>

Zone containment is half-open: a position (px, py) is inside iff
x <= px < x + w and y <= py < y + h.  Zones on one page must not overlap.
p1 defaults to 0; for KEY_PRESS a missing p1 becomes the lowercased ASCII
code of the label's first character, and for PAGE_GOTO p1 indexes the
document-order page list.
"""
from __future__ import annotations

import statistics
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass, field

from .engine import ActionType, Order


class InterfaceParseError(ValueError):
    """Malformed XML; carries the reported line when available."""


class InterfaceValidationError(ValueError):
    """Well-formed XML violating the interface schema."""


@dataclass(frozen=True)
class Zone:
    id: str
    x: int
    y: int
    w: int
    h: int
    label: str
    action: ActionType
    p1: int = 0
    p2: int = 0

    @property
    def rect(self) -> tuple[int, int, int, int]:
        return self.x, self.y, self.w, self.h

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    def order(self) -> Order:
        return Order(int(self.action), self.p1, self.p2)


@dataclass(frozen=True)
class Page:
    id: str
    zones: tuple[Zone, ...]


@dataclass(frozen=True)
class InterfaceSpec:
    name: str
    width: int
    height: int
    start_page: str
    pages: tuple[Page, ...]

    @property
    def page_order(self) -> list[str]:
        return [p.id for p in self.pages]

    def page(self, page_id: str) -> Page:
        for p in self.pages:
            if p.id == page_id:
                return p
        raise KeyError(f"unknown page {page_id!r}")


def _rects_overlap(a: Zone, b: Zone) -> bool:
    return (a.x < b.x + b.w and b.x < a.x + a.w
            and a.y < b.y + b.h and b.y < a.y + a.h)


def _int_attr(el, name, zone_desc, default=None):
    raw = el.get(name)
    if raw is None:
        if default is None:
            raise InterfaceValidationError(f"{zone_desc}: missing attribute {name!r}")
        return default
    try:
        return int(raw)
    except ValueError:
        raise InterfaceValidationError(
            f"{zone_desc}: attribute {name!r} is not an integer: {raw!r}") from None


def parse_interface(document: str) -> InterfaceSpec:
    """Parse and validate an interface document."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise InterfaceParseError(f"XML parse error at line {line}, column {col}: {exc}") from exc

    if root.tag != "interface":
        raise InterfaceValidationError(f"root element must be <interface>, got <{root.tag}>")
    name = root.get("name", "")
    width = _int_attr(root, "width", "<interface>")
    height = _int_attr(root, "height", "<interface>")
    if width < 1 or height < 1:
        raise InterfaceValidationError("interface width/height must be >= 1")
    start = root.get("start")
    if start is None:
        raise InterfaceValidationError("<interface> missing 'start' page id")

    pages = []
    page_ids = set()
    for page_el in root:
        if page_el.tag != "page":
            raise InterfaceValidationError(f"unexpected element <{page_el.tag}> under <interface>")
        pid = page_el.get("id")
        if not pid:
            raise InterfaceValidationError("<page> missing id")
        if pid in page_ids:
            raise InterfaceValidationError(f"duplicate page id {pid!r}")
        page_ids.add(pid)

        zones = []
        for zone_el in page_el:
            if zone_el.tag != "zone":
                raise InterfaceValidationError(
                    f"page {pid!r}: unexpected element <{zone_el.tag}>")
            zid = zone_el.get("id")
            if not zid:
                raise InterfaceValidationError(f"page {pid!r}: zone missing id")
            desc = f"zone {zid!r}"
            x = _int_attr(zone_el, "x", desc)
            y = _int_attr(zone_el, "y", desc)
            w = _int_attr(zone_el, "w", desc)
            h = _int_attr(zone_el, "h", desc)
            label = zone_el.get("label", "")
            action_name = zone_el.get("action", "NOOP")
            try:
                action = ActionType[action_name]
            except KeyError:
                raise InterfaceValidationError(
                    f"{desc}: unknown action {action_name!r}") from None
            p1_default = 0
            if action is ActionType.KEY_PRESS and label:
                p1_default = ord(label[0].lower())
            p1 = _int_attr(zone_el, "p1", desc, default=p1_default)
            p2 = _int_attr(zone_el, "p2", desc, default=0)

            if w < 1 or h < 1:
                raise InterfaceValidationError(f"{desc}: w and h must be >= 1")
            if x < 0 or y < 0 or x + w > width or y + h > height:
                raise InterfaceValidationError(f"{desc}: rectangle out of interface bounds")
            zones.append(Zone(zid, x, y, w, h, label, action, p1, p2))

        for i, a in enumerate(zones):
            for b in zones[i + 1:]:
                if _rects_overlap(a, b):
                    raise InterfaceValidationError(
                        f"zones {a.id!r} and {b.id!r} overlap on page {pid!r}")
        pages.append(Page(pid, tuple(zones)))

    if not pages:
        raise InterfaceValidationError("interface must declare at least one page")
    if start not in page_ids:
        raise InterfaceValidationError(f"start page {start!r} does not exist")

    spec = InterfaceSpec(name, width, height, start, tuple(pages))
    n_pages = len(pages)
    for page in pages:
        for z in page.zones:
            if z.action is ActionType.PAGE_GOTO and not (0 <= z.p1 < n_pages):
                raise InterfaceValidationError(
                    f"zone {z.id!r}: PAGE_GOTO target index {z.p1} out of range")
    return spec


def serialize_interface(spec: InterfaceSpec) -> str:
    """Emit XML that parses back to an equal spec."""
    root = ET.Element("interface", name=spec.name, width=str(spec.width),
                      height=str(spec.height), start=spec.start_page)
    for page in spec.pages:
        page_el = ET.SubElement(root, "page", id=page.id)
        for z in page.zones:
            ET.SubElement(page_el, "zone", id=z.id, x=str(z.x), y=str(z.y),
                          w=str(z.w), h=str(z.h), label=z.label,
                          action=z.action.name, p1=str(z.p1), p2=str(z.p2))
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


class LookupTable:
    """Per-page grid resolving positions to zones in O(1).

    Each cell caches the zones whose rectangles intersect it (zero or one
    for typical layouts since zones never overlap); hit_test confirms exact
    containment against the candidates, so table answers match a linear
    zone scan at every position regardless of cell size.
    """

    def __init__(self, spec: InterfaceSpec, cell_size: int = 4):
        if cell_size < 1:
            raise ValueError("cell_size must be >= 1")
        self.spec = spec
        self.cell_size = cell_size
        self.cols = (spec.width + cell_size - 1) // cell_size
        self.rows = (spec.height + cell_size - 1) // cell_size
        self._grids: dict[str, list[tuple[Zone, ...]]] = {}
        for page in spec.pages:
            grid: list[list[Zone]] = [[] for _ in range(self.cols * self.rows)]
            for z in page.zones:
                c0 = z.x // cell_size
                c1 = (z.x + z.w - 1) // cell_size
                r0 = z.y // cell_size
                r1 = (z.y + z.h - 1) // cell_size
                for r in range(r0, min(r1, self.rows - 1) + 1):
                    base = r * self.cols
                    for c in range(c0, min(c1, self.cols - 1) + 1):
                        grid[base + c].append(z)
            self._grids[page.id] = [tuple(cell) for cell in grid]

    def cell_zones(self, page_id: str, col: int, row: int) -> tuple[Zone, ...]:
        return self._grids[page_id][row * self.cols + col]


def build_lookup(spec: InterfaceSpec, cell_size: int = 4) -> LookupTable:
    return LookupTable(spec, cell_size)


def hit_test(table: LookupTable, page_id: str, pos) -> str | None:
    """Zone id whose rectangle contains pos, or None."""
    if page_id not in table._grids:
        raise KeyError(f"unknown page {page_id!r}")
    px, py = pos
    col = int(px) // table.cell_size
    row = int(py) // table.cell_size
    if not (0 <= col < table.cols and 0 <= row < table.rows):
        return None
    for z in table.cell_zones(page_id, col, row):
        if z.contains(px, py):
            return z.id
    return None


@dataclass
class ClickDetector:
    """Press/release from tracked-area drop (hand closing shrinks the blob).

    While open, the baseline is the rolling median of recent areas; a press
    fires after m_frames consecutive frames below down_ratio of baseline,
    and releases as soon as the area rises above up_ratio.  The baseline is
    frozen while pressed so a slow release cannot drag it down.
    """

    down_ratio: float = 0.6
    up_ratio: float = 0.8
    m_frames: int = 3
    window: int = 15
    pressed: bool = False
    baseline: float = 0.0
    _history: deque = field(default_factory=deque)
    _below: int = 0

    def __post_init__(self):
        if not (0.0 < self.down_ratio < self.up_ratio <= 1.0):
            raise ValueError("need 0 < down_ratio < up_ratio <= 1")
        if self.m_frames < 1 or self.window < 1:
            raise ValueError("m_frames and window must be >= 1")

    def update_click(self, new_area: float) -> str | None:
        """Feed one area sample; returns 'down', 'up', or None."""
        if new_area < 0:
            raise ValueError("area must be >= 0")
        if self.pressed:
            if self.baseline > 0 and new_area / self.baseline > self.up_ratio:
                self.pressed = False
                self._below = 0
                self._push(new_area)
                return "up"
            return None

        self.baseline = statistics.median(self._history) if self._history else float(new_area)
        ratio = new_area / self.baseline if self.baseline > 0 else 1.0
        self._push(new_area)
        if ratio < self.down_ratio:
            self._below += 1
            if self._below >= self.m_frames:
                self.pressed = True
                self._below = 0
                return "down"
        else:
            self._below = 0
        return None

    def _push(self, area: float):
        self._history.append(float(area))
        while len(self._history) > self.window:
            self._history.popleft()


def update_click(detector: ClickDetector, new_area: float):
    """Functional wrapper: returns (detector, edge)."""
    return detector, detector.update_click(new_area)


@dataclass(frozen=True)
class ZoneEvent:
    kind: str   # "enter" | "leave"
    zone: str
    page: str


@dataclass(frozen=True)
class Interaction:
    events: tuple[ZoneEvent, ...]
    order: Order | None
    page: str
    zone: str | None          # zone under the cursor after this step
    pressed_zone: str | None


class InterfaceSession:
    """Mutable interaction state: current page, hover, and press bookkeeping.

    Owns the double-click synthesis: a second press on the same MOUSE_LEFT
    zone within double_click_ms is emitted as MOUSE_DOUBLE.
    """

    def __init__(self, spec: InterfaceSpec, table: LookupTable | None = None,
                 cell_size: int = 4, double_click_ms: int = 600):
        self.spec = spec
        self.table = table or build_lookup(spec, cell_size)
        self.page = spec.start_page
        self.hovered: str | None = None
        self.pressed_zone: str | None = None
        self.double_click_ms = double_click_ms
        self._last_down: tuple[str, float] | None = None

    def goto_page(self, page_id: str):
        self.spec.page(page_id)  # raises KeyError when unknown
        if page_id != self.page:
            if self.hovered is not None:
                self.hovered = None
            self.page = page_id

    def interact(self, cursor_pos, edge: str | None, time_ms: float = 0.0) -> Interaction:
        """Resolve one frame's cursor position and click edge into effects."""
        zone_id = hit_test(self.table, self.page, cursor_pos)
        events = []
        if zone_id != self.hovered:
            if self.hovered is not None:
                events.append(ZoneEvent("leave", self.hovered, self.page))
            if zone_id is not None:
                events.append(ZoneEvent("enter", zone_id, self.page))
            self.hovered = zone_id

        order = None
        if edge == "down" and zone_id is not None:
            zone = next(z for z in self.spec.page(self.page).zones if z.id == zone_id)
            self.pressed_zone = zone_id
            if zone.action is ActionType.PAGE_GOTO:
                target = self.spec.pages[zone.p1].id
                self.page = target
                self.hovered = None
                self._last_down = None
            elif (zone.action is ActionType.MOUSE_LEFT
                  and self._last_down is not None
                  and self._last_down[0] == zone_id
                  and time_ms - self._last_down[1] <= self.double_click_ms):
                order = Order(int(ActionType.MOUSE_DOUBLE), zone.p1, zone.p2)
                self._last_down = None
            else:
                order = zone.order()
                self._last_down = (zone_id, time_ms)
        elif edge == "up":
            self.pressed_zone = None

        return Interaction(tuple(events), order, self.page, self.hovered,
                           self.pressed_zone)
