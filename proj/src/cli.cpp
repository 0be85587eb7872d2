#include "uwmac/cli.hpp"

#include "uwmac/policies.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace uwmac::cli
{
    namespace
    {
        using nlohmann::json;

        class FieldReader
        {
        public:
            std::vector<std::string> errors;

            const json *member(const json &obj, const std::string &path, const char *key, bool required)
            {
                auto it = obj.find(key);
                if (it == obj.end())
                {
                    if (required)
                        errors.push_back(join(path, key) + ": missing required field");
                    return nullptr;
                }
                return &*it;
            }

            std::optional<std::int64_t> integer(const json &obj, const std::string &path, const char *key,
                                                bool required, std::int64_t min)
            {
                const json *v = member(obj, path, key, required);
                if (!v)
                    return std::nullopt;
                if (!v->is_number_integer())
                {
                    errors.push_back(join(path, key) + ": expected an integer");
                    return std::nullopt;
                }
                const auto value = v->get<std::int64_t>();
                if (value < min)
                {
                    errors.push_back(join(path, key) + ": must be >= " + std::to_string(min));
                    return std::nullopt;
                }
                return value;
            }

            std::optional<double> number(const json &obj, const std::string &path, const char *key, bool required)
            {
                const json *v = member(obj, path, key, required);
                if (!v)
                    return std::nullopt;
                if (!v->is_number())
                {
                    errors.push_back(join(path, key) + ": expected a number");
                    return std::nullopt;
                }
                return v->get<double>();
            }

            static std::string join(const std::string &path, const char *key)
            {
                return path.empty() ? std::string(key) : path + "." + key;
            }
        };

        std::optional<Role> parse_role(FieldReader &r, const json &role, const std::string &path)
        {
            if (!role.is_object() || role.size() != 1)
            {
                r.errors.push_back(path + ": expected an object with exactly one of tdma, aloha, model_aware");
                return std::nullopt;
            }
            const auto &[kind, body] = *role.items().begin();
            const std::string bpath = path + "." + kind;
            if (!body.is_object())
            {
                r.errors.push_back(bpath + ": expected an object");
                return std::nullopt;
            }

            if (kind == "tdma")
            {
                TdmaSchedule s;
                const auto frame = r.integer(body, bpath, "frame_length", true, 1);
                const json *assigned = r.member(body, bpath, "assigned", true);
                if (assigned && !assigned->is_array())
                    r.errors.push_back(bpath + ".assigned: expected an array");
                else if (assigned)
                    for (std::size_t k = 0; k < assigned->size(); ++k)
                    {
                        const auto &off = (*assigned)[k];
                        if (!off.is_number_integer())
                            r.errors.push_back(bpath + ".assigned[" + std::to_string(k) + "]: expected an integer");
                        else
                            s.assigned.push_back(off.get<Slot>());
                    }
                if (!frame)
                    return std::nullopt;
                s.frame_length = *frame;
                return TdmaRole{s};
            }
            if (kind == "aloha")
            {
                const auto q = r.number(body, bpath, "q", true);
                if (!q)
                    return std::nullopt;
                return AlohaRole{AlohaParams{*q}};
            }
            if (kind == "model_aware")
            {
                bool member = false;
                if (const json *g = r.member(body, bpath, "gateway_member", false))
                {
                    if (!g->is_boolean())
                        r.errors.push_back(bpath + ".gateway_member: expected a boolean");
                    else
                        member = g->get<bool>();
                }
                return ModelAwareRole{member};
            }
            r.errors.push_back(path + ": unknown role '" + kind + "' (expected tdma, aloha or model_aware)");
            return std::nullopt;
        }

        std::optional<Delay> parse_delay(FieldReader &r, const json &node, const std::string &path)
        {
            const bool has_slots = node.contains("delay_slots");
            const bool has_geometry = node.contains("geometry");
            if (has_slots == has_geometry)
            {
                r.errors.push_back(path + ": exactly one of delay_slots or geometry is required");
                return std::nullopt;
            }
            if (has_slots)
            {
                auto d = r.integer(node, path, "delay_slots", true, 0);
                return d ? std::optional<Delay>(Delay{*d}) : std::nullopt;
            }

            const json &g = node["geometry"];
            const std::string gpath = path + ".geometry";
            if (!g.is_object())
            {
                r.errors.push_back(gpath + ": expected an object");
                return std::nullopt;
            }
            const auto dist = r.number(g, gpath, "distance_m", true);
            const auto speed = r.number(g, gpath, "sound_speed_mps", true);
            const auto dt = r.number(g, gpath, "slot_duration_s", true);
            if (!dist || !speed || !dt)
                return std::nullopt;
            try
            {
                return delay_from_distance(*dist, *speed, *dt);
            }
            catch (const ValidationError &e)
            {
                for (const auto &v : e.violations())
                    r.errors.push_back(gpath + "." + v);
                return std::nullopt;
            }
        }

        std::string default_branch_label(const SimReport &report)
        {
            return report.oracle ? to_string(report.oracle->chosen_branch) : "";
        }

        std::string point_label(std::string_view id, const std::vector<std::pair<std::string, double>> &params)
        {
            std::string label(id);
            label += '[';
            for (std::size_t k = 0; k < params.size(); ++k)
            {
                if (k)
                    label += ';';
                label += params[k].first + "=" + format_double(params[k].second);
            }
            label += ']';
            return label;
        }

        void apply_overrides(Scenario &s, const RunOptions &opts)
        {
            if (opts.slots)
                s.horizon = *opts.slots;
            if (opts.warmup)
                s.warmup = *opts.warmup;
            if (opts.seed)
                s.seed = *opts.seed;
        }

        void print_errors(std::ostream &err, const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
        }
    }

    Scenario parse_scenario(std::string_view json_text, std::string default_id)
    {
        json doc;
        try
        {
            doc = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ValidationError({std::string("<document>: ") + e.what()});
        }
        if (!doc.is_object())
            throw ValidationError({"<document>: expected a JSON object"});

        FieldReader r;
        Scenario s;
        s.id = std::move(default_id);
        if (const json *id = r.member(doc, "", "id", false))
        {
            if (id->is_string())
                s.id = id->get<std::string>();
            else
                r.errors.emplace_back("id: expected a string");
        }

        if (auto h = r.integer(doc, "", "horizon", true, 1))
            s.horizon = *h;
        if (auto w = r.integer(doc, "", "warmup", false, 0))
            s.warmup = *w;
        if (const json *seed = r.member(doc, "", "seed", true))
        {
            if (seed->is_number_unsigned())
                s.seed = seed->get<std::uint64_t>();
            else
                r.errors.emplace_back("seed: expected a nonnegative integer");
        }

        if (const json *nodes = r.member(doc, "", "nodes", true))
        {
            if (!nodes->is_array())
                r.errors.emplace_back("nodes: expected an array");
            else
                for (std::size_t i = 0; i < nodes->size(); ++i)
                {
                    const json &n = (*nodes)[i];
                    const std::string path = "nodes[" + std::to_string(i) + "]";
                    if (!n.is_object())
                    {
                        r.errors.push_back(path + ": expected an object");
                        continue;
                    }
                    const auto id = r.integer(n, path, "id", true, 0);
                    const auto delay = parse_delay(r, n, path);
                    std::optional<Role> role;
                    if (const json *rj = r.member(n, path, "role", true))
                        role = parse_role(r, *rj, path + ".role");
                    if (id && delay && role)
                        s.nodes.push_back(NodeSpec{NodeId{static_cast<std::uint32_t>(*id)}, *delay, *role});
                }
        }

        if (!r.errors.empty())
            throw ValidationError(std::move(r.errors));
        s.validate();
        return s;
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ValidationError({path.string() + ": cannot open file"});
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str(), path.stem().string());
    }

    GridParameter parse_grid_spec(std::string_view spec)
    {
        const auto eq = spec.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ValidationError({"--sweep '" + std::string(spec) + "': expected name=v1,v2,..."});
        GridParameter g;
        g.name = std::string(spec.substr(0, eq));
        std::string_view rest = spec.substr(eq + 1);
        while (!rest.empty())
        {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || ptr != item.data() + item.size())
                throw ValidationError({"--sweep " + g.name + ": '" + std::string(item) + "' is not a number"});
            g.values.push_back(v);
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        return g;
    }

    std::string format_double(double v)
    {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    }

    std::string csv_escape(std::string_view field)
    {
        if (field.find_first_of(",\"\r\n") == std::string_view::npos)
            return std::string(field);
        std::string out = "\"";
        for (char c : field)
        {
            if (c == '"')
                out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    Verdict judge(const SimReport &report, std::optional<double> tolerance)
    {
        Verdict v;
        if (!report.oracle)
        {
            v.status = report.tdma_cross_collisions > 0 ? "oracle_not_applicable:tdma_cross_collisions"
                                                        : "oracle_not_applicable:no_model_aware";
            return v;
        }
        v.tolerance = tolerance.value_or(default_tolerance(report.oracle->optimal_throughput, report.measured_slots));
        v.pass = compare_to_oracle(report, *report.oracle, *v.tolerance).pass;
        v.status = "ok";
        return v;
    }

    std::string csv_row(std::string_view scenario_id, std::uint64_t seed, const SimReport &report,
                        const Verdict &verdict)
    {
        std::ostringstream os;
        os << csv_escape(scenario_id) << ',' << seed << ',' << report.measured_slots << ',' << report.successes << ','
           << report.collisions << ',' << report.idle << ',' << format_double(report.empirical_throughput) << ',';
        if (report.oracle)
            os << format_double(report.oracle->optimal_throughput) << ',' << default_branch_label(report) << ','
               << format_double(report.oracle->z_value) << ',' << format_double(*report.deviation) << ',';
        else
            os << ",,,,";
        os << (verdict.tolerance ? format_double(*verdict.tolerance) : "") << ','
           << (verdict.pass ? (*verdict.pass ? "true" : "false") : "") << ',' << report.tdma_cross_collisions << ','
           << csv_escape(verdict.status);
        return os.str();
    }

    std::string csv_error_row(std::string_view scenario_id, std::uint64_t seed, std::string_view error)
    {
        std::string flat(error);
        for (auto &c : flat)
            if (c == '\n')
                c = ' ';
        return csv_escape(scenario_id) + "," + std::to_string(seed) + ",,,,,,,,,,,,," + csv_escape("error: " + flat);
    }

    void write_text_report(std::ostream &os, const Scenario &scenario, const SimReport &report,
                           const Verdict &verdict)
    {
        os << "scenario:             " << scenario.id << '\n'
           << "nodes:                " << scenario.nodes.size() << " (" << scenario.model_aware_count()
           << " model-aware, " << scenario.tdma_count() << " TDMA, " << scenario.aloha_count() << " ALOHA)\n"
           << "seed:                 " << scenario.seed << '\n'
           << "measured AP slots:    [" << report.warmup << ", " << report.warmup + scenario.horizon << ") = "
           << report.measured_slots << " (warm-up " << report.warmup << " excluded)\n"
           << "successes:            " << report.successes << '\n'
           << "collisions:           " << report.collisions << '\n'
           << "idle:                 " << report.idle << '\n'
           << "empirical throughput: " << format_double(report.empirical_throughput) << '\n';

        if (report.oracle)
        {
            os << "oracle throughput:    " << format_double(report.oracle->optimal_throughput) << '\n'
               << "branch:               " << to_string(report.oracle->chosen_branch) << '\n'
               << "z:                    " << format_double(report.oracle->z_value) << '\n'
               << "deviation:            " << format_double(*report.deviation) << '\n'
               << "tolerance:            " << format_double(*verdict.tolerance) << '\n'
               << "result:               " << (*verdict.pass ? "PASS" : "FAIL") << '\n';
        }
        else
        {
            os << "oracle throughput:    n/a (" << verdict.status << ")\n";
        }
        if (report.tdma_cross_collisions > 0)
            os << "tdma cross collisions: " << report.tdma_cross_collisions << '\n';

        os << "per-node successes:\n";
        for (const auto &[id, count] : report.per_node_successes)
        {
            const auto &n = scenario.node(id);
            const char *role = n.is_tdma() ? "tdma" : n.is_aloha() ? "aloha" : "model_aware";
            os << "  node " << id.value << " (" << role << ", delay " << n.delay.slots << "): " << count << '\n';
        }
    }

    int cmd_run(const RunOptions &opts, std::ostream &out, std::ostream &err)
    {
        Scenario scenario;
        SimReport report;
        Verdict verdict;
        try
        {
            scenario = load_scenario(opts.scenario);
            apply_overrides(scenario, opts);
            if (opts.tolerance && !(*opts.tolerance > 0.0))
                throw ValidationError({"--tolerance: must be positive"});
            report = run(scenario);
            verdict = judge(report, opts.tolerance);
        }
        catch (const std::exception &e)
        {
            print_errors(err, e);
            return exit_input_error;
        }

        write_text_report(out, scenario, report, verdict);
        if (!report.oracle && report.tdma_cross_collisions > 0)
            err << "warning: TDMA arrivals collide with each other; oracle comparison not applicable\n";

        if (opts.out)
        {
            std::ofstream csv(*opts.out, std::ios::binary);
            if (!csv)
            {
                err << "error: cannot write " << opts.out->string() << '\n';
                return exit_input_error;
            }
            csv << csv_header << "\r\n" << csv_row(scenario.id, scenario.seed, report, verdict) << "\r\n";
        }
        return verdict.pass.value_or(true) ? exit_ok : exit_failed;
    }

    int cmd_sweep(const SweepOptions &opts, std::ostream &out, std::ostream &err)
    {
        Scenario base;
        std::vector<GridParameter> grid;
        try
        {
            base = load_scenario(opts.scenario);
            apply_overrides(base, opts);
            if (opts.tolerance && !(*opts.tolerance > 0.0))
                throw ValidationError({"--tolerance: must be positive"});
            for (const auto &spec : opts.grid)
                grid.push_back(parse_grid_spec(spec));
        }
        catch (const std::exception &e)
        {
            print_errors(err, e);
            return exit_input_error;
        }

        const auto points = sweep(base, grid);

        std::ostringstream csv;
        csv << csv_header << "\r\n";
        bool all_ok = true;
        for (const auto &pt : points)
        {
            const std::string label = point_label(base.id, pt.params);
            if (!pt.report)
            {
                csv << csv_error_row(label, pt.seed, pt.error) << "\r\n";
                all_ok = false;
                continue;
            }
            const auto verdict = judge(*pt.report, opts.tolerance);
            if (verdict.pass && !*verdict.pass)
                all_ok = false;
            csv << csv_row(label, pt.seed, *pt.report, verdict) << "\r\n";
        }

        if (opts.out)
        {
            std::ofstream file(*opts.out, std::ios::binary);
            if (!file)
            {
                err << "error: cannot write " << opts.out->string() << '\n';
                return exit_input_error;
            }
            file << csv.str();
        }
        else
        {
            out << csv.str();
        }
        return all_ok ? exit_ok : exit_failed;
    }

    int cmd_verify(const VerifyOptions &opts, std::ostream &out, std::ostream &err)
    {
        if (opts.horizon > max_enumeration_horizon)
        {
            err << "error: --horizon " << opts.horizon << " exceeds the enumeration limit of "
                << max_enumeration_horizon << '\n';
            return exit_input_error;
        }
        if (opts.horizon == 0)
        {
            err << "error: --horizon must be positive\n";
            return exit_input_error;
        }

        Certificate cert;
        try
        {
            Scenario scenario = load_scenario(opts.scenario);
            if (opts.warmup)
                scenario.warmup = *opts.warmup;
            std::optional<ActionSequence> override_seq;
            if (opts.corrupt_policy)
            {
                auto seq = policy_sequence(scenario, opts.horizon);
                seq.front() = seq.front() == Action::Transmit ? Action::Wait : Action::Transmit;
                override_seq = std::move(seq);
            }
            cert = certify(scenario, opts.horizon, 1e-12, override_seq);
        }
        catch (const std::exception &e)
        {
            print_errors(err, e);
            return exit_input_error;
        }

        auto show = [](const ActionSequence &seq)
        {
            std::string s;
            for (auto a : seq)
                s += a == Action::Transmit ? 'T' : 'W';
            return s;
        };
        out << "horizon:            " << opts.horizon << '\n'
            << "enumerated optimum: " << show(cert.enumerated.best) << "  value "
            << format_double(cert.enumerated.value) << '\n'
            << "policy sequence:    " << show(cert.policy) << "  value " << format_double(cert.policy_value) << '\n';
        if (cert.oracle)
            out << "oracle (window):    " << format_double(cert.oracle->optimal_throughput) << "  "
                << to_string(cert.oracle->chosen_branch) << ", z " << format_double(cert.oracle->z_value) << '\n';
        else
            out << "oracle (window):    n/a\n";
        out << "certificate:        " << (cert.match ? "MATCH" : "MISMATCH") << '\n';
        return cert.match ? exit_ok : exit_failed;
    }
}
