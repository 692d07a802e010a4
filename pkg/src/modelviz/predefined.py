"""The predeclared `idpd3` namespace: drawing types, output symbols, and the
click input symbol.  Programs include these with
``extern vocabulary idpd3::V_types`` and friends.
"""

from __future__ import annotations

from .core import CONSTRUCTED, INT, STRING, FunctionDecl, PredicateDecl, Sort, Vocabulary

SHAPES = ("circ", "rect", "text", "link", "img")

V_TYPES = Vocabulary(
    "idpd3::V_types",
    sorts=(
        Sort("shape", CONSTRUCTED, SHAPES),
        Sort("time", INT),
        Sort("key", STRING),
        Sort("color", STRING),
        Sort("label", STRING),
        Sort("width", INT),
        Sort("height", INT),
        Sort("order", INT),
        Sort("image", STRING),
    ),
)

V_OUT = Vocabulary(
    "idpd3::V_out",
    functions=(
        FunctionDecl("d3_width", ("time",), "width"),
        FunctionDecl("d3_height", ("time",), "height"),
        FunctionDecl("d3_type", ("time", "key"), "shape", partial=True),
        FunctionDecl("d3_x", ("time", "key"), "width", partial=True),
        FunctionDecl("d3_y", ("time", "key"), "height", partial=True),
        FunctionDecl("d3_color", ("time", "key"), "color", partial=True),
        FunctionDecl("d3_order", ("time", "key"), "order", partial=True),
        FunctionDecl("d3_circ_r", ("time", "key"), "width", partial=True),
        FunctionDecl("d3_rect_width", ("time", "key"), "width", partial=True),
        FunctionDecl("d3_rect_height", ("time", "key"), "height", partial=True),
        FunctionDecl("d3_text_label", ("time", "key"), "label", partial=True),
        FunctionDecl("d3_text_size", ("time", "key"), "width", partial=True),
        FunctionDecl("d3_img_path", ("time", "key"), "image", partial=True),
        FunctionDecl("d3_link_width", ("time", "key"), "width", partial=True),
        FunctionDecl("d3_link_from", ("time", "key"), "key", partial=True),
        FunctionDecl("d3_link_to", ("time", "key"), "key", partial=True),
    ),
    predicates=(
        PredicateDecl("d3_node", ("time", "key")),
        PredicateDecl("d3_isFixed", ("time", "key")),
    ),
    externs=(V_TYPES,),
)

V_IN = Vocabulary(
    "idpd3::V_in",
    predicates=(PredicateDecl("d3_click", ("time", "key")),),
    externs=(V_TYPES,),
)

PREDEFINED_VOCABULARIES = {
    "idpd3::V_types": V_TYPES,
    "idpd3::V_out": V_OUT,
    "idpd3::V_in": V_IN,
}

# wire attribute names are the symbol names with the d3_ prefix stripped
CANVAS_FUNCTIONS = ("d3_width", "d3_height")
ELEMENT_FUNCTIONS = (
    "d3_type", "d3_x", "d3_y", "d3_color", "d3_order", "d3_circ_r",
    "d3_rect_width", "d3_rect_height", "d3_text_label", "d3_text_size",
    "d3_img_path", "d3_link_width", "d3_link_from", "d3_link_to",
)
ELEMENT_FLAGS = ("d3_node", "d3_isFixed")


def wire_name(symbol: str) -> str:
    return symbol[3:] if symbol.startswith("d3_") else symbol


# attributes each shape may carry, beyond key/type (wire names)
SHAPE_ATTRIBUTES = {
    "rect": frozenset({"x", "y", "order", "color", "rect_width", "rect_height",
                       "node", "isFixed"}),
    "circ": frozenset({"x", "y", "order", "color", "circ_r", "node", "isFixed"}),
    "text": frozenset({"x", "y", "order", "color", "text_label", "text_size",
                       "node", "isFixed"}),
    # images have a path and a size but no colour
    "img": frozenset({"x", "y", "order", "img_path", "rect_width", "rect_height",
                      "node", "isFixed"}),
    "link": frozenset({"link_from", "link_to", "link_width"}),
}
