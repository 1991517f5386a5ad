#pragma once

#include <string_view>

#include "sfj/taskc/ast.hpp"

namespace sfj::taskc {

/// Syntax only; names are resolved by `analyze`. Throws CompileError carrying the
/// first syntax diagnostic.
Program parse(std::string_view source);

}  // namespace sfj::taskc
