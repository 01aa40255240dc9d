#include "strahler/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "strahler/errors.hpp"
#include "strahler/gadgets.hpp"
#include "strahler/grammar.hpp"
#include "strahler/nc1_circuit.hpp"
#include "strahler/strahler_core.hpp"
#include "strahler/succinct.hpp"
#include "strahler/tree.hpp"

namespace strahler {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct StrahlerCmd {
  std::string kind;
  std::string file;
  std::string algo = "balanced";
  int k = -1;
  bool has_k() const { return k >= 0; }
};

void run_strahler(const StrahlerCmd& cmd, std::ostream& out) {
  const std::string text = read_file(cmd.file);

  // Everything funnels into either a plain tree, or a TSLP for the succinct
  // algorithms; dags additionally keep their native representation.
  BinaryTree tree;
  Dag dag;
  Tslp tslp;
  const bool is_dag = cmd.kind == "dag";
  const bool is_tslp = cmd.kind == "tslp";
  if (cmd.kind == "term")
    tree = parse_term(text);
  else if (cmd.kind == "adj")
    tree = from_adjacency(parse_adjacency_file(text));
  else if (is_dag)
    dag = parse_dag_file(text);
  else
    tslp = parse_tslp_file(text);

  auto plain_tree = [&]() -> BinaryTree {
    if (is_dag) return unfold(dag);
    if (is_tslp) return tslp_val(tslp);
    return tree;
  };
  auto as_tslp = [&]() -> Tslp {
    if (is_tslp) return tslp;
    if (is_dag) return tslp_from_dag(dag);
    return balance(tree);
  };

  if (cmd.algo == "naive") {
    out << "st = " << strahler_naive(plain_tree()) << "\n";
  } else if (cmd.algo == "lowspace") {
    out << "st = " << strahler_lowspace(to_term(plain_tree())).value << "\n";
  } else if (cmd.algo == "balanced") {
    if (is_dag)
      out << "st = " << dag_strahler(dag) << "\n";
    else
      out << "st = " << tslp_strahler(as_tslp()) << "\n";
  } else if (cmd.algo == "paths") {
    if (!cmd.has_k()) throw InputError("--algo paths needs --k");
    const bool r = is_dag ? dag_statement_search(dag, cmd.k, false).accepted
                          : tslp_at_least_via_paths(as_tslp(), cmd.k);
    out << "st >= " << cmd.k << ": " << (r ? "true" : "false") << "\n";
  } else if (cmd.algo == "circuit") {
    if (!cmd.has_k()) throw InputError("--algo circuit needs --k");
    try {
      const Tslp g = as_tslp();
      const bool r = eval_circuit(build_circuit(g, cmd.k));
      out << "st >= " << cmd.k << ": " << (r ? "true" : "false") << "\n";
    } catch (const ThresholdTooLarge& e) {
      out << "st >= " << cmd.k << ": false\n";
      out << "# threshold " << e.k << " exceeds floor(log2 leaves) = " << e.max_k << "\n";
    }
  } else {
    throw InputError("unknown algorithm '" + cmd.algo + "'");
  }
}

void run_balance(const std::string& file, std::ostream& out) {
  const Tslp g = balance(parse_term(read_file(file)));
  out << print_tslp_file(g);
  out << "# depth " << tslp_depth(g) << " size " << tslp_size(g) << "\n";
}

void run_codegen(const std::string& file, std::ostream& out) {
  const StraightLineProgram p = codegen(parse_expr(read_file(file)));
  out << p.to_text();
  out << "registers = " << p.ershov << " (ershov), strahler = " << p.strahler << "\n";
}

void run_grammar_max(const std::string& file, std::ostream& out) {
  const MaxStrahler r = max_strahler(parse_grammar_file(read_file(file)));
  if (r.infinite)
    out << "st = infinity\n";
  else
    out << "st = " << r.value << "\n";
}

void run_grammar_acyclic(const std::string& file, int k, std::ostream& out) {
  const CnfGrammar g = parse_grammar_file(read_file(file));
  if (k >= 0) {
    out << "st >= " << k << ": " << (acyclic_at_least(g, k) ? "true" : "false") << "\n";
    return;
  }
  const auto r = acyclic_max_strahler(g);
  if (!r) throw Unproductive("grammar has no acyclic derivation tree");
  out << "st = " << *r << "\n";
}

void run_circuit_build(const std::string& file, int k, std::ostream& out) {
  const Tslp g = parse_tslp_file(read_file(file));
  out << print_circuit(g, build_circuit(g, k));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strahler numbers of binary trees: plain, pointer, dag, tslp and "
               "grammar representations, balancing, circuits, code generation and "
               "hardness-gadget generators"};
  app.require_subcommand(1);

  StrahlerCmd scmd;
  auto* st = app.add_subcommand("strahler", "Evaluate the Strahler number of a tree");
  st->add_option("kind", scmd.kind, "Input representation")
      ->required()
      ->check(CLI::IsMember({"term", "adj", "dag", "tslp"}));
  st->add_option("file", scmd.file, "Input file")->required();
  st->add_option("--algo", scmd.algo, "naive|lowspace|balanced|paths|circuit")
      ->check(CLI::IsMember({"naive", "lowspace", "balanced", "paths", "circuit"}));
  st->add_option("--k", scmd.k, "Threshold for paths/circuit");
  st->callback([&] { run_strahler(scmd, out); });

  std::string balance_file;
  auto* bal = app.add_subcommand("balance", "Balance a term into a log-depth TSLP");
  bal->add_option("file", balance_file, "Term file")->required();
  bal->callback([&] { run_balance(balance_file, out); });

  std::string codegen_file;
  auto* cg = app.add_subcommand("codegen", "Register-optimal straight-line code");
  cg->add_option("file", codegen_file, "Expression file")->required();
  cg->callback([&] { run_codegen(codegen_file, out); });

  auto* gr = app.add_subcommand("grammar", "CNF grammar analyses");
  gr->require_subcommand(1);
  std::string gmax_file;
  auto* gmax = gr->add_subcommand("max-st", "Max Strahler number over derivation trees");
  gmax->add_option("file", gmax_file, "Grammar file")->required();
  gmax->callback([&] { run_grammar_max(gmax_file, out); });
  std::string gac_file;
  int gac_k = -1;
  auto* gac = gr->add_subcommand("acyclic-st", "Max Strahler over acyclic derivation trees");
  gac->add_option("file", gac_file, "Grammar file")->required();
  gac->add_option("--k", gac_k, "Decide st >= k instead of maximizing");
  gac->callback([&] { run_grammar_acyclic(gac_file, gac_k, out); });

  auto* gd = app.add_subcommand("gadget", "Hardness-reduction generators");
  gd->require_subcommand(1);

  std::string maj_bits;
  auto* gmaj = gd->add_subcommand("majority", "Bit-counting tree gadget");
  gmaj->add_option("bits", maj_bits, "Bit string")->required();
  gmaj->callback([&] {
    const auto r = majority_tree(maj_bits);
    out << r.term << "\n# predicted " << r.predicted << "\n";
  });

  std::string formula_file;
  auto* gform = gd->add_subcommand("formula", "Formula-to-tree gadget");
  gform->add_option("file", formula_file, "Formula file")->required();
  gform->callback([&] {
    const auto r = formula_to_tree(pad_uniform(parse_formula(read_file(formula_file))));
    out << to_term(r.tree) << "\n# predicted " << r.predicted << "\n";
  });

  std::string circuit_file;
  auto* gcirc = gd->add_subcommand("circuit", "Monotone-circuit-to-dag gadget");
  gcirc->add_option("file", circuit_file, "Circuit file")->required();
  gcirc->callback([&] {
    const auto r = layered_circuit_to_dag(parse_circuit_file(read_file(circuit_file)));
    out << print_dag_file(r.dag) << "# predicted " << r.predicted << "\n";
  });

  std::string qbf_file;
  auto* gqbf = gd->add_subcommand("qbf", "QBF-to-grammar gadget");
  gqbf->add_option("file", qbf_file, "QBF file")->required();
  gqbf->callback([&] {
    const auto r = qbf_grammar(parse_qbf_file(read_file(qbf_file)));
    out << print_grammar_file(r.grammar);
    out << "# k " << r.k << "\n";
    out << "# predicted " << (r.predicted ? "true" : "false") << "\n";
  });

  std::string x3hs_file;
  auto* gx = gd->add_subcommand("x3hs", "Exact-3-hitting-set grammar gadget");
  gx->add_option("file", x3hs_file, "X3HS file")->required();
  gx->callback([&] {
    const auto r = x3hs_grammar(parse_x3hs_file(read_file(x3hs_file)));
    out << print_grammar_file(r.grammar);
    if (r.degenerate) out << "# degenerate empty set family\n";
    out << "# predicted " << (r.predicted ? "true" : "false") << "\n";
  });

  std::string lg_file;
  auto* glg = gd->add_subcommand("linegraph", "Line-graph-accessibility tree gadget");
  glg->add_option("file", lg_file, "Line graph file")->required();
  glg->callback([&] {
    const auto inst = parse_linegraph_file(read_file(lg_file));
    const auto r = linegraph_tree(inst.order, inst.u, inst.v);
    out << print_adjacency_file(r.tree) << "# predicted " << r.predicted << "\n";
  });

  std::string dr_file;
  std::string dr_as = "tslp";
  auto* gdr = gd->add_subcommand("dagreach", "Dag-reachability gadget");
  gdr->add_option("file", dr_file, "Dagreach file")->required();
  gdr->add_option("--as", dr_as, "tslp|grammar")
      ->check(CLI::IsMember({"tslp", "grammar"}));
  gdr->callback([&] {
    const auto inst = parse_dagreach_file(read_file(dr_file));
    if (dr_as == "tslp") {
      const auto r = dag_reach_tslp(inst.dag, inst.target);
      out << print_tslp_file(r.tslp) << "# predicted " << r.predicted << "\n";
    } else {
      const auto r = dag_reach_grammar(inst.dag, inst.target);
      out << print_grammar_file(r.grammar);
      for (std::size_t v = 0; v < r.grammar.names.size(); ++v) {
        if (r.certificate.choice[v] < 0) continue;
        const auto& p = r.grammar.prods[r.certificate.choice[v]];
        out << "# certificate " << r.grammar.names[v] << " -> ";
        if (p.eps)
          out << "eps";
        else
          out << r.grammar.names[p.b] << " " << r.grammar.names[p.c];
        out << "\n";
      }
      out << "# predicted " << r.predicted << "\n";
    }
  });

  auto* circ = app.add_subcommand("circuit", "Comparison-gate circuits from TSLPs");
  circ->require_subcommand(1);
  std::string cb_file;
  int cb_k = 0;
  auto* cbuild = circ->add_subcommand("build", "Build and dump the circuit for st >= k");
  cbuild->add_option("file", cb_file, "Tslp file")->required();
  cbuild->add_option("k", cb_k, "Threshold")->required();
  cbuild->callback([&] { run_circuit_build(cb_file, cb_k, out); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const ThresholdTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const LimitError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace strahler
