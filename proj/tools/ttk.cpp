#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ttk/io.hpp"
#include "ttk/linearize.hpp"
#include "ttk/mttnorm.hpp"
#include "ttk/spcheck.hpp"
#include "ttk/topt_algebra.hpp"

using namespace ttk;

namespace {

struct Options {
    int max_height = 7;
    std::size_t cap = 10000;
    std::string out;
};

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {}
    ~Output() noexcept(false) {
        if (path_.empty())
            std::cout << buf_.str();
        else
            write_file(path_, buf_.str());
    }
    std::ostream& stream() { return buf_; }

private:
    std::string path_;
    std::ostringstream buf_;
};

std::string seq_string(const std::vector<std::string>& seq) {
    std::string s = "(";
    for (std::size_t i = 0; i < seq.size(); ++i) s += (i ? "," : "") + seq[i];
    return s + ")";
}

RankedAlphabet parse_alphabet(const std::string& spec) {
    RankedAlphabet a;
    std::string item;
    std::istringstream is(spec);
    while (is >> item) {
        for (std::string part; !item.empty();) {
            auto comma = item.find(',');
            part = item.substr(0, comma);
            item = comma == std::string::npos ? "" : item.substr(comma + 1);
            auto slash = part.find('/');
            if (slash == std::string::npos) throw ParseError("expected symbol/rank in '" + part + "'", 0);
            a.add(part.substr(0, slash), std::stoi(part.substr(slash + 1)));
        }
    }
    return a;
}

int cmd_run(const Options& o, const std::string& file, const std::string& tree) {
    const std::string text = read_file(file);
    Output out(o.out);
    if (detect_kind(text) == FileKind::Mtt) {
        Mtt m = parse_mtt(text);
        out.stream() << to_string(evaluate(m, parse_tree(tree, m.input))) << "\n";
        return 0;
    }
    Top m = parse_top(text);
    std::set<Tree> outs = apply_all(m, parse_tree(tree, m.input), o.cap);
    std::vector<Tree> sorted(outs.begin(), outs.end());
    std::sort(sorted.begin(), sorted.end(), enumeration_less);
    for (const Tree& t : sorted) out.stream() << to_string(t) << "\n";
    if (sorted.empty()) {
        std::cerr << "input is outside the domain\n";
        return 1;
    }
    return 0;
}

int cmd_decide(const Options& o, const std::string& file) {
    const std::string text = read_file(file);
    Verdict v;
    bool verified = false;
    if (detect_kind(text) == FileKind::Mtt) {
        Mtt m = parse_mtt(text);
        v = decide_shape_preserving_mtt(m, o.max_height);
        verified = verify_verdict(m, v);
    } else {
        Top m = parse_top(text);
        v = decide_shape_preserving(m, o.max_height, o.cap);
        verified = verify_verdict(m, v, o.cap);
    }
    Output out(o.out);
    if (v.preserving()) {
        out.stream() << "PRESERVING up to height " << v.height << "\n";
        return 0;
    }
    out.stream() << "NOT PRESERVING\n";
    if (!v.rule.empty()) out.stream() << "rule: " << v.rule << "\n";
    if (v.input) out.stream() << "input: " << to_string(*v.input) << "\n";
    for (const Tree& t : v.outputs) out.stream() << "output: " << to_string(t) << "\n";
    if (!verified) std::cerr << "warning: counterexample did not re-verify\n";
    return 1;
}

void print_lin_report(std::ostream& os, const LinearizationReport& r) {
    os << "linear: " << (r.linear ? "yes" : "no") << "\n";
    os << "nondeleting: " << (r.nondeleting ? "yes" : "no") << "\n";
    os << "inputs compared: " << r.inputs << "\n";
    os << "state calls checked: " << r.state_calls << "\n";
    if (r.mismatch) os << "mismatch on: " << to_string(*r.mismatch) << "\n";
    for (const auto& v : r.violations) os << "violation: " << v << "\n";
    os << (r.passes() ? "PASS" : "FAIL") << "\n";
}

int cmd_linearize(const Options& o, const std::string& file) {
    Top m = parse_top(read_file(file));
    Verdict v = decide_shape_preserving(m, o.max_height, o.cap);
    if (!v.preserving()) {
        std::cerr << v.describe() << "\n";
        return 1;
    }
    Linearization lin = linearize(m, v, o.cap);
    {
        Output out(o.out);
        out.stream() << "// " << lin.stamp << "\n" << print_top(lin.top);
    }
    LinearizationReport r = verify_linearization(m, lin.top, o.max_height, o.cap);
    print_lin_report(std::cerr, r);
    return r.passes() ? 0 : 1;
}

int cmd_verify_norm(const Options& o, const std::string& file, const std::string& normalized) {
    Mtt m = parse_mtt(read_file(file));
    Mtt mp = parse_mtt(read_file(normalized));
    const int b = build_delay_table(m, std::min(o.max_height, 6)).b;
    Relabeling r = build_relabeling(m, b, o.cap);
    NormalizationReport rep = verify_normalization(m, &r, mp, o.max_height);
    Output out(o.out);
    out.stream() << "inputs: " << rep.inputs << "\n";
    if (rep.mismatch) out.stream() << "output mismatch on: " << to_string(*rep.mismatch) << "\n";
    if (rep.not_one_to_one) out.stream() << "not one-to-one on: " << to_string(*rep.not_one_to_one) << "\n";
    for (const auto& s : rep.nonzero_delays) out.stream() << "nonzero delay: " << s << "\n";
    for (const auto& s : rep.helper_violations) out.stream() << "helper: " << s << "\n";
    out.stream() << (rep.passes() ? "PASS" : "FAIL") << "\n";
    return rep.passes() ? 0 : 1;
}

int cmd_enum(const Options& o, const std::string& target) {
    std::vector<Tree> trees;
    std::ifstream probe(target);
    if (probe.good()) {
        const std::string text = read_file(target);
        switch (detect_kind(text)) {
        case FileKind::Nta: trees = enumerate_language(parse_nta(text), o.max_height); break;
        case FileKind::Top: trees = enumerate_language(domain_automaton(parse_top(text)), o.max_height); break;
        case FileKind::Mtt: trees = enumerate_trees(parse_mtt(text).input, o.max_height); break;
        }
    } else {
        trees = enumerate_trees(parse_alphabet(target), o.max_height);
    }
    if (trees.size() > o.cap) throw CapExceeded("enumeration exceeded cap of " + std::to_string(o.cap) + " trees");
    Output out(o.out);
    for (const Tree& t : trees) out.stream() << to_string(t) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ttk: top-down and macro tree transducer toolkit"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--max-height", o.max_height, "Height bound for enumeration-based checks")->capture_default_str();
    app.add_option("--cap", o.cap, "Limit on enumerated outputs and states")->capture_default_str();
    app.add_option("--out", o.out, "Write the result to this file");

    std::string file, file2, tree;
    int code = 0;
    auto sub = [&](const std::string& name, const std::string& help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    auto* run = sub("run", "Apply a TOP (all outputs) or an MTT to a tree");
    run->add_option("file", file)->required();
    run->add_option("tree", tree)->required();
    run->callback([&] { code = cmd_run(o, file, tree); });

    auto* compose = sub("compose", "Compose M with a total deterministic linear nondeleting N");
    compose->add_option("m", file)->required();
    compose->add_option("n", file2)->required();
    compose->callback([&] {
        Top r = compose_dlnt(parse_top(read_file(file)), parse_top(read_file(file2)));
        Output(o.out).stream() << print_top(r);
    });

    auto* domain = sub("domain", "Print the domain automaton of a TOP");
    domain->add_option("file", file)->required();
    domain->callback([&] { Output(o.out).stream() << print_nta(domain_automaton(parse_top(read_file(file)))); });

    auto* trim_cmd = sub("trim", "Drop states and rules used in no valid run");
    trim_cmd->add_option("file", file)->required();
    trim_cmd->callback([&] { Output(o.out).stream() << print_top(trim(parse_top(read_file(file)))); });

    auto* decide = sub("decide-sp", "Decide shape preservation up to --max-height");
    decide->add_option("file", file)->required();
    decide->callback([&] { code = cmd_decide(o, file); });

    auto* lin = sub("linearize", "Linearize a shape-preserving TOP, then verify the result");
    lin->add_option("file", file)->required();
    lin->callback([&] { code = cmd_linearize(o, file); });

    auto* vlin = sub("verify-lin", "Check a linearization against the original TOP");
    vlin->add_option("m", file)->required();
    vlin->add_option("linear", file2)->required();
    vlin->callback([&] {
        LinearizationReport r =
            verify_linearization(parse_top(read_file(file)), parse_top(read_file(file2)), o.max_height, o.cap);
        Output out(o.out);
        print_lin_report(out.stream(), r);
        code = r.passes() ? 0 : 1;
    });

    auto* meval = sub("mtt-eval", "Evaluate an MTT on a tree");
    meval->add_option("file", file)->required();
    meval->add_option("tree", tree)->required();
    meval->callback([&] {
        Mtt m = parse_mtt(read_file(file));
        Output(o.out).stream() << to_string(evaluate(m, parse_tree(tree, m.input))) << "\n";
    });

    auto* delays = sub("mtt-delays", "Tabulate state sequences and their delays");
    delays->add_option("file", file)->required();
    delays->callback([&] {
        DelayTable t = build_delay_table(parse_mtt(read_file(file)), std::min(o.max_height, 6));
        Output out(o.out);
        for (const auto& e : t.entries)
            out.stream() << seq_string(e.sequence) << " " << (e.delay > 0 ? "+" : "") << e.delay << "\n";
        out.stream() << "b = " << t.b << "\n";
    });

    auto* norm = sub("mtt-normalize", "Split an MTT into a relabeling and a one-to-one MTT");
    norm->add_option("file", file)->required();
    norm->callback([&] {
        Mtt m = parse_mtt(read_file(file));
        Normalization n = normalize_one_to_one(m, std::min(o.max_height, 6), o.cap);
        {
            Output out(o.out);
            std::istringstream legend(n.relabeling.legend_text());
            for (std::string line; std::getline(legend, line);) out.stream() << "// " << line << "\n";
            out.stream() << print_mtt(n.mtt);
        }
        NormalizationReport rep = verify_normalization(m, &n.relabeling, n.mtt, std::min(o.max_height, 6));
        std::cerr << (rep.passes() ? "PASS" : "FAIL") << " (" << rep.inputs << " inputs)\n";
        code = rep.passes() ? 0 : 1;
    });

    auto* vnorm = sub("verify-norm", "Check a normalized MTT against the original");
    vnorm->add_option("m", file)->required();
    vnorm->add_option("normalized", file2)->required();
    vnorm->callback([&] { code = cmd_verify_norm(o, file, file2); });

    auto* en = sub("enum", "Enumerate trees of an alphabet (\"f/2,e/0\"), automaton, TOP domain or MTT input");
    en->add_option("target", file)->required();
    en->callback([&] { code = cmd_enum(o, file); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ParseError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}
