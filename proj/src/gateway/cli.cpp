#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "t4f/analytics.hpp"
#include "t4f/error.hpp"
#include "t4f/gateway.hpp"
#include "t4f/synth.hpp"
#include "t4f/tasks.hpp"

namespace t4f::gateway {

namespace {

const std::vector<std::string> kModes = {"all_words", "hashtags", "food", "food_hashtags"};
const std::vector<std::string> kLevels = {"city", "state", "region"};

struct LearnFlags {
    std::string snapshot;
    std::string features = "all_words";
    bool lda = false;
    std::uint32_t topics = 200;
    std::uint32_t lda_iterations = 1000;
    double lda_alpha = 0;
    double lda_beta = 0.01;
    std::uint64_t seed = 42;
    double svm_c = 1.0;
    double svm_tol = 1e-4;
    std::uint32_t svm_epochs = 1000;
    double train_frac = 1.0;
    double test_frac = 1.0;
    std::uint32_t bootstrap = 10000;
    std::size_t top_k = 20;
    std::string out;
};

void add_learn_flags(CLI::App* app, LearnFlags& f) {
    app->add_option("--snapshot", f.snapshot, "Snapshot file")->required();
    app->add_option("--features", f.features, "Vocabulary mode")->check(CLI::IsMember(kModes))->capture_default_str();
    app->add_flag("--lda", f.lda, "Add LDA topic features");
    app->add_option("--topics", f.topics, "Number of LDA topics")->capture_default_str();
    app->add_option("--lda-iterations", f.lda_iterations, "Gibbs sweeps")->capture_default_str();
    app->add_option("--lda-alpha", f.lda_alpha, "Document prior (0: 5/topics)");
    app->add_option("--lda-beta", f.lda_beta, "Word prior")->capture_default_str();
    app->add_option("--seed", f.seed, "Seed for LDA and the bootstrap")->capture_default_str();
    app->add_option("--svm-c", f.svm_c, "SVM cost")->capture_default_str();
    app->add_option("--svm-tol", f.svm_tol, "SVM stopping tolerance")->capture_default_str();
    app->add_option("--svm-epochs", f.svm_epochs, "SVM epoch cap")->capture_default_str();
    app->add_option("--train-frac", f.train_frac, "Fraction of training tweets used")->capture_default_str();
    app->add_option("--test-frac", f.test_frac, "Fraction of test tweets used")->capture_default_str();
    app->add_option("--bootstrap", f.bootstrap, "Bootstrap iterations (0 disables)")->capture_default_str();
    app->add_option("--top-k", f.top_k, "Top features reported per class")->capture_default_str();
    app->add_option("--out", f.out, "Output JSON (default: stdout)");
}

tasks::TaskConfig to_config(const LearnFlags& f) {
    tasks::TaskConfig c;
    const auto mode = text::parse_vocab_mode(f.features);
    if (!mode) throw Error("unknown feature mode '" + f.features + "'");
    c.feature_mode = *mode;
    c.use_lda = f.lda;
    c.lda.num_topics = f.topics;
    c.lda.iterations = f.lda_iterations;
    c.lda.alpha = f.lda_alpha;
    c.lda.beta = f.lda_beta;
    c.lda.seed = f.seed;
    c.svm.C = f.svm_c;
    c.svm.tolerance = f.svm_tol;
    c.svm.max_epochs = f.svm_epochs;
    c.train_fraction = f.train_frac;
    c.test_fraction = f.test_frac;
    c.seed = f.seed;
    c.bootstrap_iterations = f.bootstrap;
    c.top_k = f.top_k;
    c.validate();
    return c;
}

corpus::CorpusSnapshot load_normalized(const std::string& path, const Resources& res) {
    auto snap = corpus::CorpusSnapshot::load(path);
    return snap.is_normalized() ? snap : corpus::normalize(snap, res.gazetteer);
}

text::PreparedCorpus prepared(const std::string& path, const Resources& res) {
    return text::prepare(std::make_shared<const corpus::CorpusSnapshot>(load_normalized(path, res)), res);
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << io::canonical(j) << '\n';
    } else {
        io::write_file(path, io::canonical(j) + "\n");
    }
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void print_summary(const tasks::TaskResult& r, std::ostream& out) {
    out << r.task << ": accuracy " << r.accuracy << " (" << r.correct << "/" << r.per_instance.size() << "), baseline "
        << r.baseline;
    if (r.p_value) out << ", p " << *r.p_value;
    out << ", " << r.runtime_seconds << " s\n";
}

int serve_until_signal(HttpServer& server, const ServerOptions& opts, std::ostream& out) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    // Blocked before any server thread exists so that only sigwait sees them.
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    const int port = server.start();
    out << "listening on http://" << opts.host << ":" << port << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    out << "shutting down" << std::endl;
    server.stop();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Meal-tweet corpus toolkit: ingest, normalize, model, evaluate and serve.", "t4f"};
    app.require_subcommand(1);
    std::string data_dir;
    app.add_option("--data-dir", data_dir, "Directory with the gazetteer, word lists and labels");

    // ingest
    std::string in_path, filter_csv, schema_path, out_path;
    auto* ingest = app.add_subcommand("ingest", "Filter a JSONL dump into a snapshot");
    ingest->add_option("--input", in_path, "JSONL file")->required();
    ingest->add_option("--filter", filter_csv, "Comma-separated hashtags (default: the meal hashtags)");
    ingest->add_option("--schema", schema_path, "JSON field mapping");
    ingest->add_option("--out", out_path, "Snapshot to write")->required();

    // normalize
    std::string snap_path;
    auto* normalize = app.add_subcommand("normalize", "Resolve user locations of a snapshot");
    normalize->add_option("--snapshot", snap_path, "Snapshot file")->required();
    normalize->add_option("--out", out_path, "Snapshot to write")->required();

    // synth
    std::string spec_arg = "default", manifest_path;
    std::uint64_t synth_seed = 7;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with planted signal");
    synth_cmd->add_option("--spec", spec_arg, "'default' or a JSON file of overrides")->capture_default_str();
    synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", out_path, "JSONL file to write")->required();
    synth_cmd->add_option("--manifest", manifest_path, "Manifest path (default: <out>.manifest.json)");

    // lda
    LearnFlags lda_flags;
    auto* lda = app.add_subcommand("lda", "Train a topic model on a snapshot");
    lda->add_option("--snapshot", lda_flags.snapshot, "Snapshot file")->required();
    lda->add_option("--features", lda_flags.features, "Vocabulary mode")->check(CLI::IsMember(kModes))->capture_default_str();
    lda->add_option("--topics", lda_flags.topics, "Number of topics")->capture_default_str();
    lda->add_option("--iterations", lda_flags.lda_iterations, "Gibbs sweeps")->capture_default_str();
    lda->add_option("--alpha", lda_flags.lda_alpha, "Document prior (0: 5/topics)");
    lda->add_option("--beta", lda_flags.lda_beta, "Word prior")->capture_default_str();
    lda->add_option("--seed", lda_flags.seed, "Sampler seed")->capture_default_str();
    lda->add_option("--out", lda_flags.out, "Model file; a .topics.json summary is written next to it")->required();

    // task
    auto* task = app.add_subcommand("task", "Run a prediction task");
    task->require_subcommand(1);
    LearnFlags task_flags;
    std::string dataset, level = "state";
    auto* state_chars = task->add_subcommand("state-chars", "Leave-one-state-out prediction of a state label");
    add_learn_flags(state_chars, task_flags);
    state_chars->add_option("--dataset", dataset, "Label set")
        ->check(CLI::IsMember({"overweight", "diabetes", "political"}))
        ->required();
    auto* locale = task->add_subcommand("locale", "Chronological-split locale prediction");
    add_learn_flags(locale, task_flags);
    locale->add_option("--level", level, "Locale level")->check(CLI::IsMember(kLevels))->capture_default_str();

    // curve
    LearnFlags curve_flags;
    std::string fractions_csv = "0.2,0.4,0.6,0.8,1.0";
    auto* curve = app.add_subcommand("curve", "Locale accuracy over train/test fractions");
    add_learn_flags(curve, curve_flags);
    curve->add_option("--level", level, "Locale level")->check(CLI::IsMember(kLevels))->capture_default_str();
    curve->add_option("--fractions", fractions_csv, "Comma-separated fractions")->capture_default_str();

    // rank-terms
    std::string vocab = "food";
    auto* rank = app.add_subcommand("rank-terms", "Most distinctive term per state");
    rank->add_option("--snapshot", snap_path, "Snapshot file")->required();
    rank->add_option("--vocab", vocab, "Vocabulary mode")->check(CLI::IsMember(kModes))->capture_default_str();
    rank->add_option("--out", out_path, "Output JSON (default: stdout)");

    // serve
    ServerOptions server_opts;
    std::string model_path, runs_dir, static_dir;
    auto* serve = app.add_subcommand("serve", "Serve the read-only HTTP API");
    serve->add_option("--snapshot", snap_path, "Snapshot file")->required();
    serve->add_option("--model", model_path, "Topic model file");
    serve->add_option("--runs", runs_dir, "Directory of task result JSON files");
    serve->add_option("--host", server_opts.host, "Listen address")->capture_default_str();
    serve->add_option("--port", server_opts.port, "Port (0 picks a free one)")->capture_default_str();
    serve->add_option("--static", static_dir, "Web UI bundle to serve at /");
    serve->add_flag("--cors", server_opts.cors, "Allow cross-origin requests");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto res = std::make_shared<const Resources>(
            Resources::load(data_dir.empty() ? Resources::default_data_dir() : std::filesystem::path(data_dir)));

        if (ingest->parsed()) {
            const auto filter = filter_csv.empty() ? corpus::default_filter() : corpus::normalize_filter(split_csv(filter_csv));
            corpus::SchemaMapping schema;
            if (!schema_path.empty()) schema = corpus::SchemaMapping::from_json(Json::parse(io::read_file(schema_path)));
            const auto snap = corpus::ingest_jsonl(in_path, filter, schema);
            snap.save(out_path);
            out << io::canonical(snap.manifest()) << '\n';
        } else if (normalize->parsed()) {
            const auto snap = corpus::normalize(corpus::CorpusSnapshot::load(snap_path), res->gazetteer);
            snap.save(out_path);
            out << "normalized " << snap.normalized_count() << " of " << snap.size() << " tweets\n";
        } else if (synth_cmd->parsed()) {
            const auto spec = spec_arg == "default" ? synth::SynthSpec::default_spec()
                                                    : synth::SynthSpec::from_json(Json::parse(io::read_file(spec_arg)));
            const auto manifest = synth::write_synthetic_corpus(spec, synth_seed, *res, out_path, manifest_path);
            out << "wrote " << manifest.at("counts").at("lines") << " lines to " << out_path << '\n';
        } else if (lda->parsed()) {
            const auto prep = prepared(lda_flags.snapshot, *res);
            const auto mode = text::parse_vocab_mode(lda_flags.features);
            if (!mode) throw Error("unknown feature mode '" + lda_flags.features + "'");
            std::vector<std::vector<std::string>> docs;
            docs.reserve(prep.filtered.size());
            for (const auto& d : prep.filtered) docs.push_back(text::restrict_to_mode(d, *mode, res->food_lexicon));
            topics::LdaParams params;
            params.num_topics = lda_flags.topics;
            params.iterations = lda_flags.lda_iterations;
            params.alpha = lda_flags.lda_alpha;
            params.beta = lda_flags.lda_beta;
            params.seed = lda_flags.seed;
            const auto model = topics::train_lda(docs, params);
            model.save(lda_flags.out);
            io::write_file(lda_flags.out + ".topics.json", model.summary_json().dump(2) + "\n");
            out << "trained " << model.num_topics() << " topics over " << model.total_tokens() << " tokens\n";
        } else if (state_chars->parsed()) {
            const auto config = to_config(task_flags);
            const auto prep = prepared(task_flags.snapshot, *res);
            const auto labels = tasks::StateLabelSet::load_named(res->data_dir, dataset);
            const auto r = tasks::run_state_characteristic_task(prep, labels, config, *res);
            emit(r.to_json(), task_flags.out, out);
            if (!task_flags.out.empty()) print_summary(r, out);
        } else if (locale->parsed()) {
            const auto config = to_config(task_flags);
            const auto lvl = tasks::parse_locale_level(level);
            if (!lvl) throw Error("unknown level '" + level + "'");
            const auto prep = prepared(task_flags.snapshot, *res);
            const auto r = tasks::run_locale_task(prep, *lvl, config, *res);
            emit(r.to_json(), task_flags.out, out);
            if (!task_flags.out.empty()) print_summary(r, out);
        } else if (curve->parsed()) {
            auto config = to_config(curve_flags);
            const auto lvl = tasks::parse_locale_level(level);
            if (!lvl) throw Error("unknown level '" + level + "'");
            std::vector<double> fractions;
            for (const auto& f : split_csv(fractions_csv)) {
                try {
                    fractions.push_back(std::stod(f));
                } catch (const std::exception&) {
                    throw Error("bad fraction '" + f + "'");
                }
            }
            const auto prep = prepared(curve_flags.snapshot, *res);
            emit(tasks::learning_curve(prep, *lvl, config, fractions, *res).to_json(), curve_flags.out, out);
        } else if (rank->parsed()) {
            const auto mode = text::parse_vocab_mode(vocab);
            if (!mode) throw Error("unknown vocab '" + vocab + "'");
            const auto prep = prepared(snap_path, *res);
            emit(analytics::rank_terms_tfidf(prep, *mode, *res).to_json(), out_path, out);
        } else if (serve->parsed()) {
            std::optional<topics::TopicModel> model;
            if (!model_path.empty()) model = topics::TopicModel::load(model_path);
            std::optional<std::filesystem::path> runs;
            if (!runs_dir.empty()) runs = runs_dir;
            if (!static_dir.empty()) server_opts.static_dir = static_dir;
            auto state = std::make_shared<const ServiceState>(
                ServiceState::build(res, corpus::CorpusSnapshot::load(snap_path), std::move(model), runs));
            HttpServer server(std::make_shared<const Service>(state), server_opts);
            return serve_until_signal(server, server_opts, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace t4f::gateway
