#include "cli.hpp"

#include "symdx/cluster.hpp"
#include "symdx/error.hpp"
#include "symdx/experiment.hpp"
#include "symdx/export.hpp"
#include "symdx/reduce.hpp"
#include "symdx/triage.hpp"
#include "symdx/triage_http.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>

namespace symdx {

namespace fs = std::filesystem;
using experiment::ExperimentConfig;

namespace {

struct Options {
    std::string data, severity, model, features, config, out, format = "csv";
    std::uint64_t seed = 42;

    // synth
    std::size_t diseases = 41, records = 120;
    double unusual_fraction = 0.39, presence = 0.75;

    // cv, pca-sweep, cluster
    std::size_t folds = 5;
    std::vector<std::size_t> k_values;
    bool reduced = false, profiles = false;
    std::size_t components = 0, restarts = cluster::default_restarts;

    // serve
    std::string model_dir = "model", addr = "127.0.0.1";
    int port = 8080;
};

class Command {
public:
    Command(const Options& o, CLI::App& app, std::ostream& out) : o_(o), app_(app), out_(out) {}

    ExperimentConfig config() const
    {
        ExperimentConfig cfg;
        if (!o_.config.empty())
            cfg = experiment::load_config(o_.config);
        if (given("--data"))
            cfg.data = o_.data;
        if (given("--severity"))
            cfg.severity = o_.severity;
        if (given("--model"))
            cfg.model = experiment::parse_model_kind(o_.model);
        if (given("--features"))
            cfg.features = symptomnet::parse_feature_mode(o_.features);
        if (given("--seed"))
            cfg.seed = o_.seed;
        return cfg;
    }

    fs::path out_dir(const char* fallback) const { return o_.out.empty() ? fs::path(fallback) : fs::path(o_.out); }
    report::Format format() const { return report::parse_format(o_.format); }
    std::string ext() const { return format() == report::Format::csv ? ".csv" : ".json"; }

    void write(const report::Table& t, const fs::path& dir, const std::string& stem) const
    {
        const auto path = dir / (stem + ext());
        report::export_table(t, path, format());
        out_ << "wrote " << path.string() << "\n";
    }

    void print_reports(const std::vector<metrics::EvalReport>& reports) const
    {
        out_ << std::left << std::setw(8) << "model" << std::setw(13) << "features" << std::right
             << std::setw(10) << "f1" << std::setw(11) << "precision" << std::setw(10) << "recall" << "\n";
        out_ << std::fixed << std::setprecision(4);
        for (const auto& r : reports)
            out_ << std::left << std::setw(8) << r.model << std::setw(13) << r.features << std::right
                 << std::setw(10) << r.macro_f1 << std::setw(11) << r.macro_precision << std::setw(10)
                 << r.macro_recall << "\n";
        out_ << std::defaultfloat;
    }

    int ingest() const
    {
        auto cfg = config();
        if (!cfg.data)
            fail(ErrorCode::InvalidArgument, "ingest needs --data");
        const auto data = experiment::prepare_dataset(cfg);
        out_ << "records: " << data.corpus.size() << "\n"
             << "diseases: " << data.corpus.diseases.size() << "\n"
             << "symptoms: " << data.vocab.size() << "\n"
             << "max symptoms per record: " << data.corpus.max_symptoms << "\n"
             << "vocabulary hash: " << hash_to_hex(data.vocab.hash()) << "\n";
        for (const auto& w : data.vocab.warnings)
            out_ << "warning: " << w << "\n";
        return 0;
    }

    int synth() const
    {
        corpus::SynthSpec spec = config().synth;
        if (given("--diseases"))
            spec.num_diseases = o_.diseases;
        if (given("--records"))
            spec.records_per_disease = o_.records;
        if (given("--unusual-fraction"))
            spec.unusual_fraction = o_.unusual_fraction;
        if (given("--presence"))
            spec.presence = o_.presence;
        if (given("--seed"))
            spec.seed = o_.seed;
        const auto path = o_.out.empty() ? fs::path("synthetic.csv") : fs::path(o_.out);
        const auto corpus = corpus::synth_generate(spec);
        corpus::save_dataset(corpus, path);
        out_ << "wrote " << corpus.size() << " records over " << corpus.diseases.size() << " diseases to "
             << path.string() << "\n";
        return 0;
    }

    int analyze() const
    {
        const auto data = experiment::prepare_dataset(config());
        const auto dir = out_dir("analysis");
        export_analysis(data, dir);
        const auto uniq = symptomnet::uniqueness_report(data.profiles, data.occurrence);
        const auto sim = symptomnet::similarity_matrix(data.profiles);
        out_ << "symptoms: " << data.vocab.size() << ", unusual: " << data.occurrence.symptoms_at(1) << "\n";
        if (uniq.mean_rate)
            out_ << "mean uniqueness rate: " << *uniq.mean_rate << "\n";
        out_ << "disjoint disease pairs: " << sim.disjoint_pairs << " of " << sim.total_pairs << "\n";
        return 0;
    }

    void export_analysis(const experiment::Dataset& data, const fs::path& dir) const
    {
        const auto names = data.corpus.diseases;
        const auto sim = symptomnet::similarity_matrix(data.profiles);
        write(report::occurrence_series(data.occurrence), dir, "occurrence_histogram");
        write(report::symptom_occurrence_table(data.vocab, data.occurrence), dir, "symptom_occurrence");
        write(report::uniqueness_table(symptomnet::uniqueness_report(data.profiles, data.occurrence)), dir,
              "uniqueness");
        write(report::similarity_table(sim, names), dir, "similarity");
        write(report::similar_pairs_table(symptomnet::similar_pairs(sim.similarity), names), dir, "similar_pairs");
    }

    int train() const
    {
        const auto cfg = config();
        const auto data = experiment::prepare_dataset(cfg);
        const auto result = experiment::run_experiment(cfg, data);
        const auto dir = out_dir("model");
        symptomnet::save_snapshot(symptomnet::make_snapshot(data.vocab, data.profiles), dir / triage::network_file);
        if (result.model.lssvm)
            lssvm::save_model(*result.model.lssvm, dir / triage::lssvm_file);
        if (result.model.cnn) {
            convnet::save_model(*result.model.cnn, dir / triage::cnn_file);
            write(report::loss_table(result.model.loss_history), dir, "loss");
        }
        report::export_report(result.report, dir / "report.json", report::Format::structured);
        print_reports({result.report});
        out_ << "saved model to " << dir.string() << "\n";
        return 0;
    }

    int eval() const
    {
        const auto report = experiment::run_experiment(config());
        print_reports({report});
        if (!o_.out.empty()) {
            const fs::path dir = o_.out;
            report::export_report(report, dir / ("report" + ext()), format());
            write(report::confusion_table(report), dir, "confusion");
        }
        return 0;
    }

    int ablate() const
    {
        const auto cfg = config();
        const auto started = std::chrono::steady_clock::now();
        const auto reports = experiment::ablate(cfg, experiment::prepare_dataset(cfg));
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        print_reports(reports);
        out_ << "elapsed: " << elapsed.count() << " s\n";
        if (!o_.out.empty())
            write(report::evaluation_table(reports), o_.out, "evaluation");
        return 0;
    }

    int cv() const
    {
        const auto cfg = config();
        const auto reports = experiment::cross_validate(cfg, experiment::prepare_dataset(cfg), o_.folds);
        report::Table t{{"fold", "accuracy", "f1", "precision", "recall"}, {}};
        double sum = 0.0;
        for (std::size_t f = 0; f < reports.size(); ++f) {
            const auto& r = reports[f];
            sum += r.accuracy;
            t.rows.push_back({std::to_string(f + 1), report::format_double(r.accuracy),
                              report::format_double(r.macro_f1), report::format_double(r.macro_precision),
                              report::format_double(r.macro_recall)});
            out_ << "fold " << f + 1 << ": accuracy " << r.accuracy << ", macro f1 " << r.macro_f1 << "\n";
        }
        out_ << "mean accuracy: " << sum / static_cast<double>(reports.size()) << "\n";
        if (!o_.out.empty())
            write(t, o_.out, "cv");
        return 0;
    }

    std::vector<reduce::SweepPoint> sweep_components(const experiment::Dataset& data) const
    {
        const auto subset = symptomnet::feature_subset(data.vocab, data.occurrence, config().features);
        const auto active = data.matrix.subset_cols(subset);
        std::vector<std::size_t> ks = o_.k_values;
        if (ks.empty())
            for (std::size_t k = 1; k <= std::min<std::size_t>(20, active.cols()); ++k)
                ks.push_back(k);
        return reduce::component_sweep(active, ks, o_.folds, config().seed);
    }

    int pca_sweep() const
    {
        const auto data = experiment::prepare_dataset(config());
        const auto sweep = sweep_components(data);
        for (const auto& p : sweep)
            out_ << "k=" << p.k << " mean accuracy " << p.mean_accuracy << "\n";
        out_ << "selected components: " << reduce::select_component_count(sweep) << "\n";
        write(report::pca_sweep_table(sweep), out_dir("pca"), "pca_sweep");
        return 0;
    }

    int run_cluster(const experiment::Dataset& data, const fs::path& dir) const
    {
        const auto cfg = config();
        numkit::Matrix m = data.matrix.features;
        std::vector<std::string> labels;
        if (o_.profiles) {
            m = numkit::Matrix(data.profiles.size(), data.vocab.size());
            for (std::size_t i = 0; i < data.profiles.size(); ++i) {
                labels.push_back(data.profiles[i].disease);
                for (std::size_t j = 0; j < data.vocab.size(); ++j)
                    m(i, j) = data.profiles[i].incidence[j];
            }
        } else {
            for (int label : data.matrix.labels)
                labels.push_back(data.matrix.class_names[static_cast<std::size_t>(label)]);
        }
        if (o_.reduced) {
            std::size_t k = o_.components;
            if (k == 0) {
                k = reduce::select_component_count(sweep_components(data));
                out_ << "pca components: " << k << "\n";
            }
            m = reduce::project(reduce::fit_pca(m, k), m);
        }

        std::vector<std::size_t> ks = o_.k_values;
        if (ks.empty())
            for (std::size_t k = 2; k <= std::min<std::size_t>(10, m.rows()); ++k)
                ks.push_back(k);
        const auto sweep = cluster::k_sweep(m, ks, cfg.seed, o_.restarts);
        std::size_t best = 0;
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            out_ << "k=" << sweep[i].k << " silhouette " << sweep[i].silhouette << "\n";
            if (sweep[i].silhouette > sweep[best].silhouette)
                best = i;
        }
        const auto chosen = cluster::kmeans_cosine(m, sweep[best].k, cfg.seed, o_.restarts);
        out_ << "best k: " << chosen.k << "\n";
        write(report::cluster_sweep_table(sweep), dir, "cluster_sweep");
        write(report::membership_table(chosen, labels), dir, "membership");
        write(report::cluster_size_table(chosen), dir, "cluster_sizes");
        return 0;
    }

    int cluster() const { return run_cluster(experiment::prepare_dataset(config()), out_dir("clusters")); }

    int serve() const
    {
        const auto state = triage::load_state(o_.model_dir, config().seed);
        const triage::TriageService service(&state);
        out_ << "serving " << o_.model_dir << " on http://" << o_.addr << ":" << o_.port << std::endl;
        triage::serve(service, o_.addr, o_.port);
        return 0;
    }

    int report_all() const
    {
        const auto cfg = config();
        const auto data = experiment::prepare_dataset(cfg);
        const auto dir = out_dir("report");
        export_analysis(data, dir);
        const auto reports = experiment::ablate(cfg, data);
        print_reports(reports);
        write(report::evaluation_table(reports), dir, "evaluation");
        for (const auto& r : reports)
            if (r.model == experiment::to_string(cfg.model) && r.features == "all")
                write(report::per_class_table(r), dir, "per_class");
        write(report::pca_sweep_table(sweep_components(data)), dir, "pca_sweep");
        return run_cluster(data, dir);
    }

private:
    bool given(const char* name) const
    {
        for (const auto* app = &app_; app; app = app->get_parent())
            if (const auto* opt = app->get_option_no_throw(name); opt && opt->count() > 0)
                return true;
        return false;
    }

    const Options& o_;
    CLI::App& app_;
    std::ostream& out_;
};

int exit_code(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::usage:
        return 1;
    case ErrorCategory::data:
        return 2;
    case ErrorCategory::numerical:
        return 3;
    }
    return 2;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Disease-symptom analytics and triage toolkit", "symdx"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--data", o.data, "Symptom dataset CSV (Disease,Symptom_1,...)");
    app.add_option("--severity", o.severity, "Symptom severity CSV (Symptom,weight)");
    app.add_option("--model", o.model, "Model: lssvm or cnn");
    app.add_option("--features", o.features, "Feature mode: all or common_only");
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--out", o.out, "Output directory (or file for synth)");
    app.add_option("--config", o.config, "JSON experiment config");
    app.add_option("--format", o.format, "Export format: csv or structured");

    std::vector<std::pair<CLI::App*, int (Command::*)() const>> commands;
    auto add = [&](const char* name, const char* help, int (Command::*fn)() const) {
        auto* sub = app.add_subcommand(name, help);
        commands.emplace_back(sub, fn);
        return sub;
    };
    add("ingest", "Validate and summarize a dataset", &Command::ingest);
    auto* synth = add("synth", "Generate a synthetic corpus", &Command::synth);
    synth->add_option("--diseases", o.diseases);
    synth->add_option("--records", o.records, "Records per disease");
    synth->add_option("--unusual-fraction", o.unusual_fraction);
    synth->add_option("--presence", o.presence, "Per-record symptom probability");
    add("analyze", "Occurrence, uniqueness and similarity exports", &Command::analyze);
    add("train", "Train a model and save it with the symptom network", &Command::train);
    add("eval", "Evaluate one model and feature mode on a held-out split", &Command::eval);
    add("ablate", "Evaluate both models with and without unusual symptoms", &Command::ablate);
    auto* cv = add("cv", "Stratified k-fold evaluation", &Command::cv);
    cv->add_option("--folds", o.folds);
    auto* pca = add("pca-sweep", "Cross-validated accuracy per PCA component count", &Command::pca_sweep);
    pca->add_option("--folds", o.folds);
    pca->add_option("--k", o.k_values, "Component counts")->delimiter(',');
    auto* cl = add("cluster", "Cosine k-means sweep and membership", &Command::cluster);
    cl->add_option("--k", o.k_values, "Cluster counts")->delimiter(',');
    cl->add_flag("--reduced", o.reduced, "Cluster PCA-projected rows");
    cl->add_option("--components", o.components, "PCA components (default: selected by pca sweep)");
    cl->add_flag("--profiles", o.profiles, "Cluster disease profiles instead of records");
    cl->add_option("--restarts", o.restarts);
    cl->add_option("--folds", o.folds);
    auto* serve = add("serve", "Serve trained models over HTTP", &Command::serve);
    serve->add_option("--model-dir", o.model_dir);
    serve->add_option("--addr", o.addr);
    serve->add_option("--port", o.port);
    auto* rep = add("report", "Write every export into one directory", &Command::report_all);
    rep->add_option("--k", o.k_values, "Cluster counts")->delimiter(',');
    rep->add_flag("--reduced", o.reduced);
    rep->add_option("--components", o.components);
    rep->add_option("--folds", o.folds);

    std::vector<std::string> argv_store{"symdx"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store)
        argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        for (const auto& [sub, fn] : commands)
            if (sub->parsed())
                return (Command(o, *sub, out).*fn)();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace symdx
