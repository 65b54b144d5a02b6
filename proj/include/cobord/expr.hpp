#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cobord/cycles.hpp"

namespace cobord {

/// Parses an element expression such as `3*[V ->h X ; L1,L2] - [W ->k X]`.
///
///   expr    := ['-'] term (('+' | '-') term)*
///   term    := [INT '*'] product
///   product := atom ('.' atom)*
///   atom    := cycle | '(' expr ')' | call
///   cycle   := '[' V '->' h X [';' L (',' L)*] ']' ['@' arrow]
///   call    := push(f, g, expr) | pull(g, expr) | spull(f, expr) | chern(L, expr)
///            | ext(expr, expr) | unit(X) | orient(f)
///
/// A cycle without '@' lives over `default_arrow`. Malformed input and
/// unknown names raise ExpressionError; operation failures keep their own type.
Element parse_expression(const Site& site, std::string_view text, std::optional<MorphismId> default_arrow = {});

/// The grammar above, for usage messages.
std::string expression_synopsis();

}  // namespace cobord
