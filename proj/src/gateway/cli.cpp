#include "pubcat/gateway/cli.hpp"

#include <csignal>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "pubcat/csv.hpp"
#include "pubcat/error.hpp"
#include "pubcat/gateway/serialization.hpp"
#include "pubcat/gateway/server.hpp"
#include "pubcat/gateway/service.hpp"

namespace pubcat {

namespace {

struct Options {
  std::string store = "pubcat-store";
  std::string link_base = "http://localhost:8080";
  std::optional<double> confidence;
  std::optional<double> margin;
  std::optional<double> p;

  std::string listen = "127.0.0.1:8080";
  std::string static_dir;

  std::string field;
  std::string scope;
  std::string file;
  std::string panel;
  std::string output;
  std::string kind = "finals";
  std::string format = "csv";
  std::string roster;
  std::uint64_t seed = 0;
  int round = 1;
  int count = 0;
  std::optional<int> sample_size;
  std::optional<std::string> panel_id;
};

SamplingParams sampling_defaults(const Options& o) {
  SamplingParams p;
  if (o.confidence) p.confidence_z = *o.confidence;
  if (o.margin) p.margin_e = *o.margin;
  if (o.p) p.proportion_p = *o.p;
  return p;
}

std::string mailing_csv(const std::vector<MailingEntry>& entries) {
  std::string out = "expert_id,email,token,link\n";
  for (const auto& e : entries) {
    out += csv::join({e.expert_id, e.email, e.token, e.link});
    out += '\n';
  }
  return out;
}

std::string rates_csv(const std::vector<ResponseRateRow>& rows) {
  std::string out = "field,round,sample_n,answers,rate_percent,provisional\n";
  for (const auto& r : rows) {
    out += csv::join({r.field.name, std::to_string(r.round), std::to_string(r.sample_n),
                      std::to_string(r.answers), csv::format_fixed(r.rate_percent, 2),
                      r.provisional ? "yes" : "no"});
    out += '\n';
  }
  return out;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_file_atomic(o.output, text);
  }
}

int serve(Service& service, const Options& o, std::ostream& out) {
  ServerOptions options = parse_listen_address(o.listen);
  if (!o.static_dir.empty()) options.static_dir = o.static_dir;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(service, options);
  const int port = server.bind();
  out << "listening on " << options.host << ":" << port << std::endl;
  std::thread worker([&] { server.listen(); });
  int received = 0;
  sigwait(&signals, &received);
  server.stop();
  worker.join();
  out << "stopped" << std::endl;
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delphi consultation for publisher categories", "pubcat"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--store", o.store, "Store directory")->envname("PUBCAT_STORE")->capture_default_str();
  app.add_option("--link-base", o.link_base, "Base URL of questionnaire links")
      ->envname("PUBCAT_LINK_BASE")
      ->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--listen", o.listen, "host:port")->envname("PUBCAT_LISTEN")->capture_default_str();
  serve_cmd->add_option("--static", o.static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

  auto* import_ranking = app.add_subcommand("import-ranking", "Import a publisher,icee CSV");
  import_ranking->add_option("--field", o.field)->required();
  import_ranking->add_option("--scope", o.scope)->required()->check(CLI::IsMember({"domestic", "foreign"}));
  import_ranking->add_option("file", o.file)->required();

  auto* import_roster = app.add_subcommand("import-roster", "Import an expert_id,field,email CSV");
  import_roster->add_option("file", o.file)->required();

  auto* create = app.add_subcommand("create-panel", "Draw a sample and create a panel");
  create->add_option("--field", o.field)->required();
  create->add_option("--seed", o.seed)->required();
  create->add_option("--confidence", o.confidence, "z value")->envname("PUBCAT_CONFIDENCE");
  create->add_option("--margin", o.margin, "margin of error")->envname("PUBCAT_MARGIN");
  create->add_option("--p", o.p, "expected proportion")->envname("PUBCAT_P");
  create->add_option("--id", o.panel_id, "panel id");
  create->add_option("--sample-size", o.sample_size, "override the computed size");

  auto* extend = app.add_subcommand("extend-panel", "Add supplementary experts to round 1");
  extend->add_option("--panel", o.panel)->required();
  extend->add_option("--count", o.count)->required();
  extend->add_option("--seed", o.seed)->required();
  extend->add_option("--roster", o.roster, "supplementary roster CSV");

  auto* open = app.add_subcommand("open-round", "Open a round");
  auto* close = app.add_subcommand("close-round", "Close a round");
  for (auto* cmd : {open, close}) {
    cmd->add_option("--panel", o.panel)->required();
    cmd->add_option("--round", o.round)->required()->check(CLI::Range(1, 2));
  }

  auto* tokens = app.add_subcommand("tokens", "Mailing list with questionnaire links");
  tokens->add_option("--panel", o.panel)->required();
  tokens->add_option("--output", o.output);

  auto* remind = app.add_subcommand("remind", "Mailing list of nonrespondents");
  remind->add_option("--panel", o.panel)->required();
  remind->add_option("--round", o.round)->required()->check(CLI::Range(1, 2));
  remind->add_option("--output", o.output);

  auto* finalize = app.add_subcommand("finalize", "Compute final categories");
  finalize->add_option("--panel", o.panel)->required();

  auto* report = app.add_subcommand("report", "Response rates and equalization");
  report->add_option("--panel", o.panel, "one panel; all panels when omitted");
  report->add_option("--format", o.format)->check(CLI::IsMember({"csv", "structured"}))->capture_default_str();
  report->add_option("--output", o.output);

  auto* export_cmd = app.add_subcommand("export", "Write a CSV export");
  export_cmd->add_option("--kind", o.kind)
      ->check(CLI::IsMember({"finals", "sample", "ranking"}))
      ->capture_default_str();
  export_cmd->add_option("--panel", o.panel);
  export_cmd->add_option("--field", o.field);
  export_cmd->add_option("--scope", o.scope)->check(CLI::IsMember({"domestic", "foreign"}));
  export_cmd->add_option("--output", o.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 2;
  }

  try {
    FileStore store(o.store);
    Service service(store, sampling_defaults(o), {}, o.link_base);

    if (*serve_cmd) return serve(service, o, out);

    if (*import_ranking) {
      const auto list = service.import_ranking(o.field, parse_scope(o.scope), read_file(o.file));
      out << "imported " << list.entries.size() << " entries for " << list.field.name << " ("
          << scope_name(list.scope) << ")\n";
      for (const auto& w : list.warnings) out << "warning: " << w << "\n";
    } else if (*import_roster) {
      out << "imported " << service.import_roster(read_file(o.file)) << " experts\n";
    } else if (*create) {
      CreatePanelRequest request{o.field, o.seed, std::nullopt, o.panel_id, o.sample_size};
      const auto s = service.create_panel(request);
      out << "created panel " << s.id << ": population " << s.population << ", sample "
          << s.sample.size() << "\n";
    } else if (*extend) {
      ExtendPanelRequest request{o.panel, o.count, o.seed, std::nullopt};
      if (!o.roster.empty()) request.supplement = parse_roster_csv(read_file(o.roster));
      const auto added = service.extend_panel(request);
      out << "added " << added.size() << " experts to " << o.panel << "\n";
    } else if (*open || *close) {
      const PanelState state = *open ? service.open_round(o.panel, o.round) : service.close_round(o.panel, o.round);
      out << o.panel << ": " << panel_state_name(state) << "\n";
    } else if (*tokens) {
      emit(o, out, mailing_csv(service.mailing_list(o.panel)));
    } else if (*remind) {
      emit(o, out, mailing_csv(service.reminders(o.panel, o.round)));
    } else if (*finalize) {
      const auto finals = service.finalize(o.panel);
      out << "finalized " << o.panel << ": " << finals.size() << " publishers\n";
    } else if (*report) {
      if (o.format == "csv") {
        emit(o, out, rates_csv(o.panel.empty() ? service.response_rate_table() : service.response_rates(o.panel)));
      } else {
        auto panel_doc = [&](const std::string& id) {
          const auto doc = service.analytics(id);
          return json{{"panel_id", id},
                      {"state", panel_state_name(service.panel(id).state)},
                      {"response_rates", doc.response_rates},
                      {"equalization", doc.equalization ? json(*doc.equalization) : json(nullptr)}};
        };
        json doc;
        if (!o.panel.empty()) {
          doc = panel_doc(o.panel);
        } else {
          json panels = json::array();
          for (const auto& id : service.panel_ids()) panels.push_back(panel_doc(id));
          doc = json{{"response_rates", service.response_rate_table()}, {"panels", std::move(panels)}};
        }
        emit(o, out, doc.dump(2) + "\n");
      }
    } else if (*export_cmd) {
      if (o.kind == "ranking") {
        if (o.field.empty() || o.scope.empty()) {
          err << "export --kind ranking needs --field and --scope\n";
          return 2;
        }
        const auto list = store.load_ranking(Field::named(o.field).id, parse_scope(o.scope));
        if (!list) throw Error(ErrorCode::UnknownRanking, "no " + o.scope + " ranking for '" + o.field + "'");
        emit(o, out, export_ranking_csv(*list));
      } else {
        if (o.panel.empty()) {
          err << "export --kind " << o.kind << " needs --panel\n";
          return 2;
        }
        emit(o, out, o.kind == "finals" ? service.finals_csv(o.panel) : service.sample_csv(o.panel));
      }
    }
    return 0;
  } catch (const Error& e) {
    err << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pubcat"};
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(args.size() + 1), argv.data(), out, err);
}

}  // namespace pubcat
