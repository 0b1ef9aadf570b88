#pragma once

#include <string>

#include "ttk/automata.hpp"
#include "ttk/mtt.hpp"
#include "ttk/topt.hpp"

namespace ttk {

enum class FileKind { Top, Mtt, Nta };

/// Kind of a transducer/automaton text by its first keyword line.
FileKind detect_kind(const std::string& text);

Top parse_top(const std::string& text);
std::string print_top(const Top& m);

Mtt parse_mtt(const std::string& text);
std::string print_mtt(const Mtt& m);

TreeAutomaton parse_nta(const std::string& text);
std::string print_nta(const TreeAutomaton& a);

/// Parses the right-hand side of a TOP rule for a symbol of rank k.
Tree parse_top_rhs(const Top& m, const std::string& text, int k);
/// Parses the right-hand side of an MTT rule.
Tree parse_mtt_rhs(const Mtt& m, const std::string& text, int k, int params);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ttk
