"""JSON scene files: geometry, named objects, collections, contraction and SOD data."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .chowring import BundleGeometry, CurveClass, DivisorClass, intersect
from .cohom import rhom_dims
from .errors import SodError
from .ktheory import KClass, composite_atom
from .sod import ContractionData, ExceptionalCollection, ObjectRef, SODSpec, mutate


class SceneError(SodError):
    def __init__(self, message: str):
        super().__init__("scene", message)


def _lb(name: str, e: int, h: int) -> dict:
    return {"name": name, "divisor": {"E": e, "H": h}}


EXAMPLE54_SCENE: dict = {
    "geometry": {"twists": [-1, -1, 0]},
    "objects": [
        _lb("O(-2E)", -2, 0),
        _lb("O(-2E+H)", -2, 1),
        _lb("O(-E-H)", -1, -1),
        _lb("O(-E)", -1, 0),
        _lb("O(-H)", 0, -1),
        _lb("O", 0, 0),
        {"name": "calE", "extension": {"sub": "O(-E-H)", "quotient": "O(-2E+H)"}},
    ],
    "collections": {
        "projective_bundle": ["O(-2E)", "O(-2E+H)", "O(-E-H)", "O(-E)", "O(-H)", "O"],
    },
    "mutations": [
        {"collection": "projective_bundle", "index": 1, "direction": "left", "result": "mutated"},
    ],
    "contraction": {
        "sink": "X",
        "curves": [{"name": "C", "class": {"C": 1, "L": 0}, "pairing": {"E": 0, "H": 1}}],
        "adjacency": [],
    },
    "sod": {
        "blocks": [
            {"name": "A1", "objects": ["O(-2E)"]},
            {"name": "A2", "objects": ["calE"]},
            {"name": "A3", "objects": ["O(-2E+H)", "O(-E)", "O(-H)"]},
            {"name": "A4", "objects": ["O"]},
        ],
        "assignment": {"C": 2},
        "witnesses": {"C": [["O(-H)", 1], ["O(-E)", -2], ["O(-2E+H)", 1]]},
    },
}


@dataclass
class Scene:
    geometry: BundleGeometry
    objects: dict[str, ObjectRef]
    collections: dict[str, ExceptionalCollection]
    mutations: list[dict] = field(default_factory=list)
    contraction: ContractionData | None = None
    sod: SODSpec | None = None
    extensions: dict[str, dict] = field(default_factory=dict)

    def collection(self, name: str) -> ExceptionalCollection:
        try:
            return self.collections[name]
        except KeyError:
            raise SceneError(f"unknown collection {name!r}") from None


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise SceneError(f"{where}: missing {key!r}")
    return data[key]


def _lookup(objects: dict[str, ObjectRef], name: str, where: str) -> ObjectRef:
    if name not in objects:
        raise SceneError(f"{where}: unknown object {name!r}")
    return objects[name]


def load_scene(data: dict) -> Scene:
    """Build a :class:`Scene` from its JSON form, checking every reference."""
    try:
        return _load(data)
    except SodError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SceneError(str(exc)) from exc


def _load(data: dict) -> Scene:
    geo = _require(data, "geometry", "scene")
    g = BundleGeometry(tuple(_require(geo, "twists", "geometry")))

    objects: dict[str, ObjectRef] = {}
    extensions: dict[str, dict] = {}
    for item in data.get("objects", []):
        name = _require(item, "name", "object")
        if name in objects:
            raise SceneError(f"duplicate object {name!r}")
        if "divisor" in item:
            objects[name] = ObjectRef.line_bundle(DivisorClass.from_json(item["divisor"]), g, name)
        elif "extension" in item:
            ext = item["extension"]
            sub = _lookup(objects, _require(ext, "sub", name), name)
            quot = _lookup(objects, _require(ext, "quotient", name), name)
            if sub.divisor is None or quot.divisor is None:
                raise SceneError(f"{name}: extension ends must be line bundles")
            dims = rhom_dims(quot.divisor, sub.divisor, g)
            if dims[1] == 0:
                raise SceneError(f"{name}: Ext^1({quot.name}, {sub.name}) = 0, no non-split extension")
            parts = sub.kclass + quot.kclass
            objects[name] = ObjectRef(name, KClass.atom(composite_atom(name, parts)))
            extensions[name] = {"sub": sub.name, "quotient": quot.name, "ext_dims": dims.to_json()}
        else:
            raise SceneError(f"{name}: object needs 'divisor' or 'extension'")

    collections = {}
    for cname, names in data.get("collections", {}).items():
        collections[cname] = ExceptionalCollection(tuple(_lookup(objects, n, cname) for n in names))

    mutations = []
    for step in data.get("mutations", []):
        src = _require(step, "collection", "mutation")
        if src not in collections:
            raise SceneError(f"mutation: unknown collection {src!r}")
        index, direction = _require(step, "index", "mutation"), step.get("direction", "left")
        if isinstance(index, bool) or not isinstance(index, int):
            raise SceneError("mutation: index must be an integer")
        result = mutate(collections[src], index, direction)
        if "result" in step:
            collections[step["result"]] = result
        mutations.append(dict(step))

    contraction = None
    if "contraction" in data:
        cdata = data["contraction"]
        curves = []
        for item in cdata.get("curves", []):
            cname = _require(item, "name", "curve")
            cls = CurveClass.from_json(_require(item, "class", cname))
            if "pairing" in item:
                row = DivisorClass.from_json(item["pairing"])
                got = DivisorClass(intersect(DivisorClass(1, 0), cls, g), intersect(DivisorClass(0, 1), cls, g))
                if got != row:
                    raise SceneError(f"curve {cname}: pairing row {row.to_json()} != recomputed {got.to_json()}")
            curves.append((cname, cls))
        contraction = ContractionData(tuple(curves), frozenset(frozenset(e) for e in cdata.get("adjacency", [])), cdata.get("sink", "X"))

    sod = None
    if "sod" in data:
        sdata = data["sod"]
        blocks = []
        for b in _require(sdata, "blocks", "sod"):
            bname = _require(b, "name", "block")
            blocks.append((bname, tuple(_lookup(objects, n, bname) for n in b.get("objects", []))))
        assignment = {k: v for k, v in sdata.get("assignment", {}).items()}
        for curve, idx in assignment.items():
            if contraction is None or curve not in contraction.names:
                raise SceneError(f"sod: assignment for unknown curve {curve!r}")
            if isinstance(idx, bool) or not isinstance(idx, int):
                raise SceneError(f"sod: block index for {curve!r} must be an integer")
        witnesses = {}
        for curve, terms in sdata.get("witnesses", {}).items():
            for term in terms:
                if term[0] not in objects:
                    raise SceneError(f"witness for {curve}: unknown object {term[0]!r}")
            witnesses[curve] = tuple((str(n), int(m)) for n, m in terms)
        sod = SODSpec(tuple(blocks), assignment, witnesses)

    return Scene(g, objects, collections, mutations, contraction, sod, extensions)


def dump_scene(scene: Scene) -> dict:
    """Inverse of :func:`load_scene`; mutation results are regenerated on load, not stored."""
    objects = []
    for name, obj in scene.objects.items():
        if name in scene.extensions:
            ext = scene.extensions[name]
            objects.append({"name": name, "extension": {"sub": ext["sub"], "quotient": ext["quotient"]}})
        else:
            objects.append({"name": name, "divisor": obj.divisor.to_json()})
    derived = {m["result"] for m in scene.mutations if "result" in m}
    out: dict = {
        "geometry": {"twists": list(scene.geometry.twists)},
        "objects": objects,
        "collections": {n: c.names for n, c in scene.collections.items() if n not in derived},
        "mutations": copy.deepcopy(scene.mutations),
    }
    if scene.contraction is not None:
        g = scene.geometry
        out["contraction"] = {
            "sink": scene.contraction.sink,
            "curves": [
                {
                    "name": n,
                    "class": c.to_json(),
                    "pairing": {"E": intersect(DivisorClass(1, 0), c, g), "H": intersect(DivisorClass(0, 1), c, g)},
                }
                for n, c in scene.contraction.curves
            ],
            "adjacency": sorted(sorted(e) for e in scene.contraction.adjacency),
        }
    if scene.sod is not None:
        out["sod"] = {
            "blocks": [{"name": n, "objects": [o.name for o in objs]} for n, objs in scene.sod.blocks],
            "assignment": dict(scene.sod.assignment),
            "witnesses": {c: [[n, m] for n, m in terms] for c, terms in scene.sod.witnesses.items()},
        }
    return out


def read_scene(path: str | Path) -> Scene:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SceneError(f"cannot read scene {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SceneError("scene must be a JSON object")
    return load_scene(data)


def example54_scene() -> Scene:
    return load_scene(EXAMPLE54_SCENE)
