"""Run the CLI pipeline and parse every cooperation.dot with pydot."""

import pathlib
import shutil
import subprocess
import sys

import pydot


def main() -> int:
    cli, corpus, work = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    subprocess.run([cli, "pipeline", "-i", corpus, "-o", str(work)], check=True)

    dots = sorted(work.glob("portraits/*/cooperation.dot"))
    if not dots:
        print("no cooperation.dot files found")
        return 1
    relations = set()
    for path in dots:
        graphs = pydot.graph_from_dot_file(str(path))
        if not graphs or len(graphs) != 1:
            print(f"{path}: pydot could not parse the file")
            return 1
        graph = graphs[0]
        leaders = [n for n in graph.get_nodes() if n.get("role") in ("leader", '"leader"')]
        if len(leaders) != 1:
            print(f"{path}: expected one leader node, found {len(leaders)}")
            return 1
        for edge in graph.get_edges():
            rel = (edge.get("relation") or "").strip('"')
            style = (edge.get("style") or "").strip('"')
            if (rel, style) not in (("mentoring", "dashed"), ("coauthor", "solid")):
                print(f"{path}: unexpected edge attributes relation={rel} style={style}")
                return 1
            relations.add(rel)
    if relations != {"mentoring", "coauthor"}:
        print(f"expected both edge kinds, saw {sorted(relations)}")
        return 1
    print(f"{len(dots)} DOT files parsed by pydot")
    return 0


if __name__ == "__main__":
    sys.exit(main())
