#include "lfr/service.h"

#include <cmath>
#include <fstream>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lfr/errors.h"
#include "lfr/pipeline.h"
#include "lfr/png_io.h"

namespace lfr {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(JobState state) {
  switch (state) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "unknown";
}

namespace {

struct FieldError {
  std::string field;
  std::string message;
};

class Cancelled : public std::exception {};

double number_field(const json& body, const char* name,
                    std::optional<double> fallback) {
  if (!body.contains(name)) {
    if (fallback) return *fallback;
    throw FieldError{name, "required"};
  }
  const json& v = body.at(name);
  if (!v.is_number()) throw FieldError{name, "must be a number"};
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FieldError{name, "must be finite"};
  return d;
}

int int_field(const json& body, const char* name, int fallback) {
  if (!body.contains(name)) return fallback;
  const json& v = body.at(name);
  if (!v.is_number_integer()) throw FieldError{name, "must be an integer"};
  return v.get<int>();
}

json parse_body(const httplib::Request& req) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw FieldError{"body", "must be a JSON object"};
    return body;
  } catch (const json::parse_error&) {
    throw FieldError{"body", "invalid JSON"};
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_field_error(httplib::Response& res, const FieldError& e) {
  send_json(res, 400, {{"error", e.field + ": " + e.message}, {"field", e.field}});
}

void send_png(httplib::Response& res, const std::vector<std::uint8_t>& bytes) {
  res.status = 200;
  res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                  "image/png");
}

json job_to_json(const RenderJob& job) {
  const RenderRequest& p = job.params;
  json out = {{"id", job.id},
              {"state", to_string(job.state)},
              {"progress", job.progress},
              {"noi", p.noi},
              {"params",
               {{"df", p.df}, {"k", p.k}, {"scale", p.scale}, {"noi", p.noi},
                {"lambda_b", p.lambda_b}, {"lambda_btv", p.lambda_btv},
                {"step", p.step}, {"a", p.a}, {"b", p.b}}}};
  out["result_path"] = job.result_path ? json(job.result_path->string()) : json();
  out["error"] = job.error ? json(*job.error) : json();
  return out;
}

}  // namespace

struct RefocusService::Impl {
  ServiceOptions options;
  LightField lf;
  DisparityMap dmap;
  std::vector<std::uint8_t> center_png;
  fs::path job_dir;

  httplib::Server server;
  std::thread server_thread;

  mutable std::mutex jobs_mutex;
  std::condition_variable jobs_cv;
  std::map<std::string, RenderJob> jobs;
  std::deque<std::string> queue;
  int next_job = 1;
  bool shutting_down = false;
  std::thread worker;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    LightFieldMeta meta;
    lf = load_light_field(options.dataset_dir, &meta);
    if (options.disparity_path) {
      dmap = load_disparity(*options.disparity_path);
      if (dmap.height != lf.reference().height() ||
          dmap.width != lf.reference().width()) {
        throw LoadError("disparity map does not match the reference view");
      }
    } else {
      DisparityEstimationParams est = options.estimation;
      if (meta.disparity_range) {
        est.d_lo = meta.disparity_range->first;
        est.d_hi = meta.disparity_range->second;
      }
      dmap = plane_sweep_disparity(lf, est);
    }
    center_png = encode_png(lf.reference(), lf.bit_depth);

    if (options.job_dir) {
      job_dir = *options.job_dir;
    } else {
      std::random_device rd;
      job_dir = fs::temp_directory_path() /
                ("lfr-jobs-" + std::to_string(rd()) + std::to_string(rd()));
    }
    fs::create_directories(job_dir);

    install_routes();
    worker = std::thread([this] { run_worker(); });
  }

  ~Impl() {
    server.stop();
    if (server_thread.joinable()) server_thread.join();
    {
      std::lock_guard lock(jobs_mutex);
      shutting_down = true;
    }
    jobs_cv.notify_all();
    if (worker.joinable()) worker.join();
  }

  double df_slack() const { return std::max(1.0, 0.25 * (dmap.d_max - dmap.d_min)); }

  void check_df(double df) const {
    const double slack = df_slack();
    if (df < dmap.d_min - slack || df > dmap.d_max + slack) {
      throw FieldError{"df", "outside disparity range [" +
                                 std::to_string(dmap.d_min) + ", " +
                                 std::to_string(dmap.d_max) + "] +/- " +
                                 std::to_string(slack)};
    }
  }

  void check_focus(double df, double k, double a, double b) const {
    if (k < 0.0) throw FieldError{"k", "must be >= 0"};
    if (!(a > 0.0)) throw FieldError{"a", "must be > 0"};
    if (b < 0.0 || b > 1.0) throw FieldError{"b", "must lie in [0, 1]"};
    check_df(df);
  }

  void check_request(const RenderRequest& r) const {
    check_focus(r.df, r.k, r.a, r.b);
    if (r.scale < 1 || r.scale > 8) throw FieldError{"scale", "must lie in [1, 8]"};
    if (r.noi < 1) throw FieldError{"noi", "must be >= 1"};
    if (r.lambda_b < 0.0) throw FieldError{"lambda_b", "must be >= 0"};
    if (r.lambda_btv < 0.0) throw FieldError{"lambda_btv", "must be >= 0"};
    if (!(r.step > 0.0)) throw FieldError{"step", "must be > 0"};
  }

  RefocusParams preview_params(const json& body) const {
    RefocusParams p;
    p.focus_disparity = number_field(body, "df", std::nullopt);
    p.bokeh_intensity = number_field(body, "k", std::nullopt);
    p.sigmoid_decay = number_field(body, "a", 15.0);
    p.sigmoid_threshold = number_field(body, "b", 0.3);
    check_focus(p.focus_disparity, p.bokeh_intensity, p.sigmoid_decay,
                p.sigmoid_threshold);
    return p;
  }

  RenderRequest render_request(const json& body) const {
    RenderRequest r;
    r.df = number_field(body, "df", std::nullopt);
    r.k = number_field(body, "k", std::nullopt);
    r.a = number_field(body, "a", 15.0);
    r.b = number_field(body, "b", 0.3);
    r.scale = int_field(body, "scale", 2);
    r.noi = int_field(body, "noi", 10);
    r.lambda_b = number_field(body, "lambda_b", 5.0);
    r.lambda_btv = number_field(body, "lambda_btv", 0.2);
    r.step = number_field(body, "step", 0.1);
    check_request(r);
    return r;
  }

  std::string submit(const RenderRequest& request) {
    std::lock_guard lock(jobs_mutex);
    RenderJob job;
    job.id = "job-" + std::to_string(next_job++);
    job.params = request;
    jobs[job.id] = job;
    queue.push_back(job.id);
    jobs_cv.notify_one();
    return job.id;
  }

  void run_worker() {
    for (;;) {
      std::string id;
      RenderRequest request;
      {
        std::unique_lock lock(jobs_mutex);
        jobs_cv.wait(lock, [this] { return shutting_down || !queue.empty(); });
        if (shutting_down) return;
        id = queue.front();
        queue.pop_front();
        jobs[id].state = JobState::kRunning;
        request = jobs[id].params;
      }
      try {
        RefocusParams rp;
        rp.focus_disparity = request.df;
        rp.bokeh_intensity = request.k;
        rp.sigmoid_decay = request.a;
        rp.sigmoid_threshold = request.b;
        SolverParams sp;
        sp.lambda_b = request.lambda_b;
        sp.lambda_btv = request.lambda_btv;
        sp.step_size = request.step;
        sp.noi = request.noi;
        const auto result = refocus(
            lf, rp, sp, DegradationSpec::for_light_field(lf, request.scale),
            dmap, {}, [this, &id](int iteration) {
              std::lock_guard lock(jobs_mutex);
              if (shutting_down) throw Cancelled();
              jobs[id].progress = iteration;
            });
        const fs::path out = job_dir / (id + ".png");
        write_png(out, result.output, lf.bit_depth);
        std::lock_guard lock(jobs_mutex);
        jobs[id].result_path = out;
        jobs[id].state = JobState::kDone;
      } catch (const Cancelled&) {
        return;
      } catch (const std::exception& e) {
        std::lock_guard lock(jobs_mutex);
        jobs[id].state = JobState::kFailed;
        jobs[id].error = e.what();
      }
    }
  }

  std::optional<RenderJob> find_job(const std::string& id) const {
    std::lock_guard lock(jobs_mutex);
    auto it = jobs.find(id);
    if (it == jobs.end()) return std::nullopt;
    return it->second;
  }

  void install_routes() {
    server.Get("/dataset/info", [this](const httplib::Request&, httplib::Response& res) {
      const ImageGrid& ref = lf.reference();
      send_json(res, 200,
                {{"rows", lf.rows},
                 {"cols", lf.cols},
                 {"width", ref.width()},
                 {"height", ref.height()},
                 {"disparity_range", {dmap.d_min, dmap.d_max}}});
    });

    server.Get("/dataset/center.png", [this](const httplib::Request&, httplib::Response& res) {
      send_png(res, center_png);
    });

    server.Get("/disparity/value", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        auto coord = [&](const char* name, int limit) {
          if (!req.has_param(name)) throw FieldError{name, "required"};
          const std::string text = req.get_param_value(name);
          std::size_t used = 0;
          int v = 0;
          try {
            v = std::stoi(text, &used);
          } catch (const std::exception&) {
            throw FieldError{name, "must be an integer"};
          }
          if (used != text.size()) throw FieldError{name, "must be an integer"};
          if (v < 0 || v >= limit) {
            throw FieldError{name, "outside [0, " + std::to_string(limit - 1) + "]"};
          }
          return v;
        };
        const int x = coord("x", dmap.width);
        const int y = coord("y", dmap.height);
        send_json(res, 200, {{"d", dmap.at(y, x)}});
      } catch (const FieldError& e) {
        send_field_error(res, e);
      }
    });

    server.Post("/refocus/preview", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const RefocusParams p = preview_params(parse_body(req));
        send_png(res, encode_png(bokeh_preview(lf, dmap, p), lf.bit_depth));
      } catch (const FieldError& e) {
        send_field_error(res, e);
      }
    });

    server.Post("/refocus/render", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const std::string id = submit(render_request(parse_body(req)));
        send_json(res, 202, {{"job_id", id}});
      } catch (const FieldError& e) {
        send_field_error(res, e);
      }
    });

    server.Get(R"(/job/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto job = find_job(req.matches[1]);
      if (!job) {
        send_json(res, 404, {{"error", "unknown job id"}});
        return;
      }
      send_json(res, 200, job_to_json(*job));
    });

    server.Get(R"(/job/([A-Za-z0-9_-]+)/result\.png)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto job = find_job(req.matches[1]);
      if (!job) {
        send_json(res, 404, {{"error", "unknown job id"}});
        return;
      }
      if (job->state != JobState::kDone || !job->result_path) {
        send_json(res, 409, {{"error", std::string("job is ") + to_string(job->state)}});
        return;
      }
      std::ifstream in(*job->result_path, std::ios::binary);
      const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                            std::istreambuf_iterator<char>()};
      send_png(res, bytes);
    });
  }
};

RefocusService::RefocusService(ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

RefocusService::~RefocusService() = default;

int RefocusService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void RefocusService::wait() {
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

void RefocusService::stop() { impl_->server.stop(); }

const LightField& RefocusService::light_field() const { return impl_->lf; }
const DisparityMap& RefocusService::disparity() const { return impl_->dmap; }

std::string RefocusService::submit(const RenderRequest& request) {
  try {
    impl_->check_request(request);
  } catch (const FieldError& e) {
    throw ContractError(e.field + ": " + e.message);
  }
  return impl_->submit(request);
}

std::optional<RenderJob> RefocusService::job(const std::string& id) const {
  return impl_->find_job(id);
}

}  // namespace lfr
