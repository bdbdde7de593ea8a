/* Accelerated core for the 2D step-function cost field.
 *
 * Stores the coefficients of an n x m step function (n = 2^p, m = 2^q) over
 * the orthogonal block basis (per axis: +1/-1 half-blocks at dyadic scales,
 * plus the all-ones vector).  Rectangle sum queries and rectangle constant
 * increments touch at most (2p+1)*(2q+1) coefficients.
 *
 * Inflation (geometric decay of all non-constant coefficients) is lazy: a
 * cumulative log-decay counter advances in O(1) and each coefficient is
 * rescaled on its next touch.
 *
 * Single writer: increase/inflate require exclusive access; cost never
 * mutates and is safe for concurrent readers while no mutation is in flight.
 */
#define PY_SSIZE_T_CLEAN
#include <Python.h>
#include <math.h>
#include <stdlib.h>

#define MAX_AXIS_COMPONENTS 64 /* 2*exponent + 1; exponents are capped well below */

typedef struct {
    PyObject_HEAD
    int p, q;
    Py_ssize_t n, m;
    double *coef;      /* n*m coefficients, flat axis-major: coef[fx*m + fy] */
    double *dlog_at;   /* log-decay stamp at last touch; NULL until decay starts */
    double dlog_total; /* cumulative sum of log(rho) over all inflate calls */
    Py_ssize_t last_touched;
} FieldCore;

/* Nonzero 1D components of the indicator of cells [s, t) (0-based).
 * Writes flat axis ids, their inner products, and the reciprocal of each
 * element's squared norm (a power of two, so division by it is exact);
 * returns the count.  The all-ones component is always last. */
static int
axis_components(Py_ssize_t s, Py_ssize_t t, int p, Py_ssize_t n,
                Py_ssize_t *ids, double *stars, double *inv_norms)
{
    int cnt = 0;
    for (int a = 0; a < p; a++) {
        Py_ssize_t span2 = (Py_ssize_t)2 << a; /* support size = squared norm */
        double inv = 1.0 / (double)span2;
        Py_ssize_t base = n - (n >> a);
        Py_ssize_t ks = s > 0 ? (s + span2 - 1) / span2 : 0;
        Py_ssize_t kt = (t + span2 - 1) / span2;
        if (ks) {
            Py_ssize_t lo = (2 * ks - 2) << a;
            Py_ssize_t hi = (2 * ks) << a;
            Py_ssize_t d1 = s - lo, d2 = hi - s;
            Py_ssize_t v = -(d1 < d2 ? d1 : d2);
            if (kt == ks) {
                Py_ssize_t e1 = t - lo, e2 = hi - t;
                v += (e1 < e2 ? e1 : e2);
            }
            if (v) {
                ids[cnt] = base + ks - 1;
                inv_norms[cnt] = inv;
                stars[cnt++] = (double)v;
            }
        }
        if (kt != ks) {
            Py_ssize_t lo = (2 * kt - 2) << a;
            Py_ssize_t hi = (2 * kt) << a;
            Py_ssize_t e1 = t - lo, e2 = hi - t;
            Py_ssize_t v = e1 < e2 ? e1 : e2;
            if (v) {
                ids[cnt] = base + kt - 1;
                inv_norms[cnt] = inv;
                stars[cnt++] = (double)v;
            }
        }
    }
    ids[cnt] = n - 1;
    inv_norms[cnt] = 1.0 / (double)n;
    stars[cnt++] = (double)(t - s);
    return cnt;
}

static int
check_rect(FieldCore *self, Py_ssize_t a1, Py_ssize_t b1, Py_ssize_t a2, Py_ssize_t b2)
{
    if (a1 < 0 || b1 < 0 || a1 >= a2 || b1 >= b2 || a2 > self->n || b2 > self->m) {
        PyErr_Format(PyExc_ValueError,
                     "rectangle (%zd,%zd)-(%zd,%zd) invalid for %zdx%zd grid",
                     a1, b1, a2, b2, self->n, self->m);
        return -1;
    }
    return 0;
}

static PyObject *
FieldCore_increase(FieldCore *self, PyObject *args)
{
    Py_ssize_t a1, b1, a2, b2;
    double value;
    if (!PyArg_ParseTuple(args, "nnnnd:increase", &a1, &b1, &a2, &b2, &value))
        return NULL;
    if (check_rect(self, a1, b1, a2, b2) < 0)
        return NULL;

    Py_ssize_t ix[MAX_AXIS_COMPONENTS], iy[MAX_AXIS_COMPONENTS];
    double sx[MAX_AXIS_COMPONENTS], sy[MAX_AXIS_COMPONENTS];
    double nx[MAX_AXIS_COMPONENTS], ny[MAX_AXIS_COMPONENTS];
    int kx = axis_components(a1, a2, self->p, self->n, ix, sx, nx);
    int ky = axis_components(b1, b2, self->q, self->m, iy, sy, ny);

    /* expansion coefficients take the projection: inner product over the
     * element's squared norm */
    double *C = self->coef;
    double *D = self->dlog_at;
    Py_ssize_t m = self->m;
    if (D) {
        double dl = self->dlog_total;
        Py_ssize_t cidx = self->n * m - 1; /* the constant element never decays */
        for (int i = 0; i < kx; i++) {
            double vx = sx[i] * nx[i] * value;
            Py_ssize_t row = ix[i] * m;
            for (int j = 0; j < ky; j++) {
                Py_ssize_t k = row + iy[j];
                if (k != cidx) {
                    double diff = dl - D[k];
                    if (diff != 0.0) {
                        C[k] *= exp(diff);
                        D[k] = dl;
                    }
                }
                C[k] += vx * (sy[j] * ny[j]);
            }
        }
    }
    else {
        for (int i = 0; i < kx; i++) {
            double vx = sx[i] * nx[i] * value;
            double *row = C + ix[i] * m;
            for (int j = 0; j < ky; j++)
                row[iy[j]] += vx * (sy[j] * ny[j]);
        }
    }
    self->last_touched = (Py_ssize_t)kx * ky;
    Py_RETURN_NONE;
}

static PyObject *
FieldCore_cost(FieldCore *self, PyObject *args)
{
    Py_ssize_t a1, b1, a2, b2;
    if (!PyArg_ParseTuple(args, "nnnn:cost", &a1, &b1, &a2, &b2))
        return NULL;
    if (check_rect(self, a1, b1, a2, b2) < 0)
        return NULL;

    Py_ssize_t ix[MAX_AXIS_COMPONENTS], iy[MAX_AXIS_COMPONENTS];
    double sx[MAX_AXIS_COMPONENTS], sy[MAX_AXIS_COMPONENTS];
    double nx[MAX_AXIS_COMPONENTS], ny[MAX_AXIS_COMPONENTS];
    int kx = axis_components(a1, a2, self->p, self->n, ix, sx, nx);
    int ky = axis_components(b1, b2, self->q, self->m, iy, sy, ny);

    double *C = self->coef;
    double *D = self->dlog_at;
    Py_ssize_t m = self->m;
    double tot = 0.0;
    if (D) {
        /* read-only: apply pending decay on the fly, do not write back */
        double dl = self->dlog_total;
        Py_ssize_t cidx = self->n * m - 1;
        for (int i = 0; i < kx; i++) {
            Py_ssize_t row = ix[i] * m;
            double sub = 0.0;
            for (int j = 0; j < ky; j++) {
                Py_ssize_t k = row + iy[j];
                double c = C[k];
                if (k != cidx) {
                    double diff = dl - D[k];
                    if (diff != 0.0)
                        c *= exp(diff);
                }
                sub += c * sy[j];
            }
            tot += sub * sx[i];
        }
    }
    else {
        for (int i = 0; i < kx; i++) {
            double *row = C + ix[i] * m;
            double sub = 0.0;
            for (int j = 0; j < ky; j++)
                sub += row[iy[j]] * sy[j];
            tot += sub * sx[i];
        }
    }
    self->last_touched = (Py_ssize_t)kx * ky;
    return PyFloat_FromDouble(tot);
}

static PyObject *
FieldCore_inflate(FieldCore *self, PyObject *args)
{
    double rho;
    if (!PyArg_ParseTuple(args, "d:inflate", &rho))
        return NULL;
    if (!(rho > 0.0 && rho <= 1.0)) {
        PyErr_SetString(PyExc_ValueError, "decay factor must be in (0, 1]");
        return NULL;
    }
    if (rho == 1.0)
        Py_RETURN_NONE;
    if (!self->dlog_at) {
        /* all prior touches happened at cumulative log-decay 0 */
        self->dlog_at = calloc((size_t)(self->n * self->m), sizeof(double));
        if (!self->dlog_at)
            return PyErr_NoMemory();
    }
    self->dlog_total += log(rho);
    Py_RETURN_NONE;
}

static PyObject *
FieldCore_coefficient(FieldCore *self, PyObject *args)
{
    Py_ssize_t fx, fy;
    if (!PyArg_ParseTuple(args, "nn:coefficient", &fx, &fy))
        return NULL;
    if (fx < 0 || fx >= self->n || fy < 0 || fy >= self->m) {
        PyErr_SetString(PyExc_ValueError, "axis component id out of range");
        return NULL;
    }
    Py_ssize_t k = fx * self->m + fy;
    double c = self->coef[k];
    if (self->dlog_at && k != self->n * self->m - 1) {
        double diff = self->dlog_total - self->dlog_at[k];
        if (diff != 0.0)
            c *= exp(diff);
    }
    return PyFloat_FromDouble(c);
}

static int
FieldCore_init(FieldCore *self, PyObject *args, PyObject *kwds)
{
    static char *kwlist[] = {"p", "q", NULL};
    int p, q;
    if (!PyArg_ParseTupleAndKeywords(args, kwds, "ii", kwlist, &p, &q))
        return -1;
    if (p < 0 || q < 0 || p >= 30 || q >= 30) {
        PyErr_SetString(PyExc_ValueError, "grid exponents out of range");
        return -1;
    }
    self->p = p;
    self->q = q;
    self->n = (Py_ssize_t)1 << p;
    self->m = (Py_ssize_t)1 << q;
    free(self->coef);
    free(self->dlog_at);
    self->coef = calloc((size_t)(self->n * self->m), sizeof(double));
    self->dlog_at = NULL;
    self->dlog_total = 0.0;
    self->last_touched = 0;
    if (!self->coef) {
        PyErr_NoMemory();
        return -1;
    }
    return 0;
}

static void
FieldCore_dealloc(FieldCore *self)
{
    free(self->coef);
    free(self->dlog_at);
    Py_TYPE(self)->tp_free((PyObject *)self);
}

static PyObject *
FieldCore_get_last_touched(FieldCore *self, void *closure)
{
    return PyLong_FromSsize_t(self->last_touched);
}

static PyObject *
FieldCore_get_p(FieldCore *self, void *closure) { return PyLong_FromLong(self->p); }
static PyObject *
FieldCore_get_q(FieldCore *self, void *closure) { return PyLong_FromLong(self->q); }

static PyMethodDef FieldCore_methods[] = {
    {"increase", (PyCFunction)FieldCore_increase, METH_VARARGS,
     "increase(a1, b1, a2, b2, value)\n\nAdd value to every cell of the rectangle."},
    {"cost", (PyCFunction)FieldCore_cost, METH_VARARGS,
     "cost(a1, b1, a2, b2) -> float\n\nSum of all cell values inside the rectangle."},
    {"inflate", (PyCFunction)FieldCore_inflate, METH_VARARGS,
     "inflate(rho)\n\nDecay every non-constant coefficient by rho (lazily)."},
    {"coefficient", (PyCFunction)FieldCore_coefficient, METH_VARARGS,
     "coefficient(fx, fy) -> float\n\nCurrent coefficient by flat axis ids."},
    {NULL}
};

static PyGetSetDef FieldCore_getset[] = {
    {"last_touched", (getter)FieldCore_get_last_touched, NULL,
     "number of coefficients touched by the most recent increase/cost", NULL},
    {"p", (getter)FieldCore_get_p, NULL, NULL, NULL},
    {"q", (getter)FieldCore_get_q, NULL, NULL, NULL},
    {NULL}
};

static PyTypeObject FieldCoreType = {
    PyVarObject_HEAD_INIT(NULL, 0)
    .tp_name = "stepplace._fieldcore.FieldCore",
    .tp_doc = "Coefficient store with logarithmic rectangle sum/increment.",
    .tp_basicsize = sizeof(FieldCore),
    .tp_flags = Py_TPFLAGS_DEFAULT,
    .tp_new = PyType_GenericNew,
    .tp_init = (initproc)FieldCore_init,
    .tp_dealloc = (destructor)FieldCore_dealloc,
    .tp_methods = FieldCore_methods,
    .tp_getset = FieldCore_getset,
};

static PyModuleDef fieldcoremodule = {
    PyModuleDef_HEAD_INIT,
    .m_name = "stepplace._fieldcore",
    .m_doc = "C accelerator for the step-function cost field.",
    .m_size = -1,
};

PyMODINIT_FUNC
PyInit__fieldcore(void)
{
    PyObject *mod;
    if (PyType_Ready(&FieldCoreType) < 0)
        return NULL;
    mod = PyModule_Create(&fieldcoremodule);
    if (!mod)
        return NULL;
    Py_INCREF(&FieldCoreType);
    if (PyModule_AddObject(mod, "FieldCore", (PyObject *)&FieldCoreType) < 0) {
        Py_DECREF(&FieldCoreType);
        Py_DECREF(mod);
        return NULL;
    }
    return mod;
}
