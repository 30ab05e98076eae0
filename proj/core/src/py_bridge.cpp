// Adapter over the embedded CPython interpreter: parses source with the
// host grammar and hands back the tree as a JSON document. The interpreter
// is initialized once per process and calls are serialized by the GIL.

#include <Python.h>

#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace idiomizer {

namespace {

const char* kHelper = R"PY(
import ast, json

def _idiomizer_dump(src):
    try:
        tree = ast.parse(src)
    except SyntaxError as e:
        return json.dumps({"error": {"msg": e.msg or "invalid syntax",
                                     "line": e.lineno or 0,
                                     "col": (e.offset or 1) - 1}})
    except (ValueError, MemoryError, RecursionError) as e:
        return json.dumps({"error": {"msg": str(e), "line": 0, "col": 0}})

    def ser(n):
        if isinstance(n, ast.AST):
            if isinstance(n, ast.Constant):
                d = {".": "Constant",
                     "p": [n.lineno, n.col_offset, n.end_lineno, n.end_col_offset]}
                v = n.value
                if v is None:
                    d["k"] = "none"
                elif isinstance(v, bool):
                    d["k"] = "bool"; d["v"] = "True" if v else "False"
                elif isinstance(v, int):
                    d["k"] = "int"; d["v"] = str(v)
                elif isinstance(v, float):
                    d["k"] = "float"; d["v"] = repr(v)
                elif isinstance(v, complex):
                    d["k"] = "complex"
                elif isinstance(v, str):
                    d["k"] = "str"
                elif isinstance(v, bytes):
                    d["k"] = "bytes"
                elif v is Ellipsis:
                    d["k"] = "ellipsis"
                else:
                    d["k"] = "other"
                return d
            if not n._fields and not n._attributes:
                return type(n).__name__  # operator tags: Lt, And, Mod, ...
            d = {".": type(n).__name__}
            if getattr(n, "end_lineno", None) is not None and hasattr(n, "lineno"):
                d["p"] = [n.lineno, n.col_offset, n.end_lineno, n.end_col_offset]
            for f in n._fields:
                d[f] = ser(getattr(n, f, None))
            return d
        if isinstance(n, list):
            return [ser(x) for x in n]
        if n is None:
            return None
        if isinstance(n, str):
            return n  # identifier-position strings (Name.id, Attribute.attr, ...)
        if isinstance(n, int):
            return str(n)  # e.g. FormattedValue.conversion
        return "?"

    return json.dumps({"ast": ser(tree)}, ensure_ascii=True)
)PY";

class PyBridge {
public:
    static PyBridge& instance() {
        static PyBridge bridge;
        return bridge;
    }

    std::string dump(std::string_view src) {
        PyGILState_STATE gil = PyGILState_Ensure();
        std::string result;
        std::string error;
        PyObject* arg = PyUnicode_DecodeUTF8(src.data(), static_cast<Py_ssize_t>(src.size()),
                                             "strict");
        if (!arg) {
            PyErr_Clear();
            error = "source is not valid UTF-8";
        } else {
            PyObject* out = PyObject_CallFunctionObjArgs(fn_, arg, nullptr);
            Py_DECREF(arg);
            if (!out) {
                PyErr_Clear();
                error = "internal parser failure";
            } else {
                Py_ssize_t len = 0;
                const char* data = PyUnicode_AsUTF8AndSize(out, &len);
                if (data) result.assign(data, static_cast<std::size_t>(len));
                else {
                    PyErr_Clear();
                    error = "internal parser failure";
                }
                Py_DECREF(out);
            }
        }
        PyGILState_Release(gil);
        if (!error.empty()) throw std::runtime_error(error);
        return result;
    }

private:
    PyBridge() {
        Py_InitializeEx(0);
        PyObject* mod = PyImport_AddModule("__idiomizer__");
        PyObject* dict = PyModule_GetDict(mod);
        PyObject* builtins = PyEval_GetBuiltins();
        PyDict_SetItemString(dict, "__builtins__", builtins);
        PyObject* r = PyRun_String(kHelper, Py_file_input, dict, dict);
        if (!r) {
            PyErr_Print();
            throw std::runtime_error("failed to initialize parser helper");
        }
        Py_DECREF(r);
        fn_ = PyDict_GetItemString(dict, "_idiomizer_dump");  // borrowed; module is immortal
        if (!fn_) throw std::runtime_error("parser helper missing");
        // Release the GIL so any thread can take it via PyGILState_Ensure.
        PyEval_SaveThread();
    }

    PyObject* fn_ = nullptr;
};

}  // namespace

std::string py_ast_dump_json(std::string_view src) { return PyBridge::instance().dump(src); }

}  // namespace idiomizer
