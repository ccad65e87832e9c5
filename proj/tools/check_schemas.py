"""Validate bundled data files against the schemas in docs/."""
import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
schemas = {name: json.loads((root / "docs" / f"{name}.schema.json").read_text()) for name in ("model", "manifest", "labels")}
for s in schemas.values():
    jsonschema.Draft202012Validator.check_schema(s)

checked = 0
def check(kind, path):
    global checked
    jsonschema.validate(json.loads(path.read_text()), schemas[kind], cls=jsonschema.Draft202012Validator)
    checked += 1

check("model", root / "data" / "model.navseg")
for corpus in ("synthetic", "synthetic-prose"):
    d = root / "data" / corpus
    check("manifest", d / "manifest")
    for f in sorted((d / "labels").glob("*.labels")):
        check("labels", f)

bad = json.loads((root / "data" / "model.navseg").read_text())
bad["config"]["c"] = -1
try:
    jsonschema.validate(bad, schemas["model"], cls=jsonschema.Draft202012Validator)
    sys.exit("negative C was accepted")
except jsonschema.ValidationError:
    pass
print(f"{checked} files valid")
