// Concrete syntax for every language of the workbench. All parsers report
// ParseError with a 1-based line and column.
#pragma once

#include <string>

#include "rwsos/imp2.hpp"
#include "rwsos/ref2.hpp"

namespace rwsos::parse {

// ident | ident(t, ..., t). With allow_vars, x1.. and y1.. are variables.
Term tiny_term(const std::string& text, bool allow_vars = false);

ImpExpr imp_expr(const std::string& text);
imp::Prog imp_program(const std::string& text);
imp2::Writer imp2_writer(const std::string& text);

// "{x=2,y=0}" or "x=2,y=0"
VarStore var_store(const std::string& text);
// one "x=2" binding, as given to --store
std::pair<std::string, std::int64_t> binding(const std::string& text);

ref2::Expr ref2_expr(const std::string& text);
ref2::Reader ref2_reader(const std::string& text);
ref2::Writer ref2_writer(const std::string& text);
// "{#0=5,#1=proc { skip }}" or "#0=5" style; values are integers, #n
// locations or readers
ref2::Store ref2_store(const std::string& text);
ref2::Value ref2_value(const std::string& text);

}  // namespace rwsos::parse
