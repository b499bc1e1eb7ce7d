from cidkit.codegen.classdiagram import ClassDiagramModel, to_class_diagram
from cidkit.codegen.dot import emit_dot
from cidkit.codegen.idl import CodegenError, GenProfile, emit_idl, write_outputs

__all__ = [
    "ClassDiagramModel",
    "CodegenError",
    "GenProfile",
    "emit_dot",
    "emit_idl",
    "to_class_diagram",
    "write_outputs",
]
