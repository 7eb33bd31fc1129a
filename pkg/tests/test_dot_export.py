from caretree import Status, export_dot, parse_tree

TEXT = """\
root "Airway"
  parallel 1 @par
    timer poll @mon "Monitor"
      query spo2_low
    sequence @main
      action laryngoscopy "Direct laryngoscopy"
"""


def test_dot_contains_every_node_and_edge():
    tree = parse_tree(TEXT)
    dot = export_dot(tree)
    assert dot.startswith("digraph")
    for node in tree.iter_preorder():
        assert f'"{node.id}"' in dot
    assert '"par" -> "mon";' in dot
    assert '"par" -> "main";' in dot


def test_glyphs_and_shapes():
    dot = export_dot(parse_tree(TEXT))
    assert "⇉ 1/2" in dot  # parallel with threshold over arity
    assert "every poll" in dot
    assert "shape=diamond" in dot  # queries
    assert "shape=ellipse" in dot  # actions


def test_status_coloring_is_opt_in():
    tree = parse_tree(TEXT)
    plain = export_dot(tree)
    assert "fillcolor" not in plain
    colored = export_dot(tree, statuses={"main": Status.RUNNING, "par": Status.SUCCESS})
    assert colored.count("fillcolor") == 2


def test_quotes_in_labels_escaped():
    tree = parse_tree('root\n  sequence\n    action say "Announce \\"clear\\""\n')
    dot = export_dot(tree)
    assert '\\"clear\\"' in dot
